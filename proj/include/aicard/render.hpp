#pragma once

#include <string>
#include <vector>

#include "aicard/card.hpp"

namespace aicard {

struct RenderOptions {
  /// Print the machine-readable specification URL in the metadata header
  /// (as text; the page carries no hyperlinks or external resources).
  bool includeMachineReadableLink = true;
  /// Labels are English only; tags outside `en` are rejected.
  std::string locale = "en";
  int radarSize = 320;
};

class RenderError : public Error {
 public:
  enum class Kind { TooFewDimensions, InvalidOptions };
  RenderError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Throws RenderError(InvalidOptions) for radarSize < 100 or a foreign locale.
void checkOptions(const RenderOptions& opts);

/// Self-contained HTML page: metadata header then nine `<h2>` sections in a
/// fixed order. No scripts, stylesheets or images are referenced.
std::string renderHtml(const AICard& card, const RenderOptions& opts = {});

/// Section headings in page order.
const std::vector<std::string>& sectionHeadings();

struct RadarPoint {
  double x = 0;
  double y = 0;
};

/// Vertex of axis `k` of `n` for `score`: angle 2*pi*k/n clockwise from
/// 12 o'clock, radius score * 0.35 * size around the centre. Unrounded.
RadarPoint radarVertex(std::size_t k, std::size_t n, double score, int size);

/// Radar chart with one axis per metric, in the given order. The score
/// polygon has class "score"; coordinates carry two decimals.
std::string renderRadarSvg(const std::vector<QualityMetric>& metrics, int size = 320);

/// Plain-text digest, at most 40 lines.
std::string renderSummary(const AICard& card);

/// "CanReverseExPost" -> "Can reverse ex post".
std::string humanize(std::string_view enumName);

/// Two-decimal fixed formatting without a negative zero.
std::string formatCoord(double v);

}  // namespace aicard
