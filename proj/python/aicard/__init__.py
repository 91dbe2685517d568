"""AI Card toolkit.

Cards are plain dicts shaped like the card JSON document; graphs are Turtle
text. Every function raises AICardError (a ValueError) on invalid input.
"""

import json as _json

from . import _aicard
from ._aicard import AICardError

__all__ = [
    "AICardError",
    "blank_card",
    "canonical_turtle",
    "check_card",
    "classify",
    "diff",
    "from_turtle",
    "isomorphic",
    "load_card",
    "policy_check",
    "query",
    "render_html",
    "render_summary",
    "to_turtle",
    "update",
    "validate",
]


def _text(card):
    return card if isinstance(card, str) else _json.dumps(card)


def load_card(text):
    """Parse and normalize card JSON text into a dict."""
    return _json.loads(_aicard.normalize_card(text))


def blank_card():
    return _json.loads(_aicard.blank_card())


def check_card(card):
    """List of (path, message) invariant issues; empty when valid."""
    return _aicard.check_card(_text(card))


def to_turtle(card):
    return _aicard.card_to_turtle(_text(card))


def from_turtle(turtle):
    return _json.loads(_aicard.turtle_to_card(turtle))


def canonical_turtle(turtle):
    return _aicard.canonical_turtle(turtle)


def isomorphic(a, b):
    return _aicard.isomorphic(a, b)


def validate(card_or_turtle, shapes_turtle=None):
    """Shape report for a card dict / JSON text, or for Turtle text."""
    if isinstance(card_or_turtle, dict):
        return _json.loads(_aicard.validate(_json.dumps(card_or_turtle), True, shapes_turtle))
    is_json = card_or_turtle.lstrip().startswith("{")
    return _json.loads(_aicard.validate(card_or_turtle, is_json, shapes_turtle))


def classify(card, rules_text=None):
    return _json.loads(_aicard.classify(_text(card), rules_text))


def query(turtle, select):
    return _json.loads(_aicard.query(turtle, select))


def update(turtle, request):
    """Returns (new_turtle, deleted, inserted)."""
    return _aicard.update(turtle, request)


def policy_check(card, policy, action):
    return _json.loads(_aicard.policy_check(_text(card), _text(policy), action))


def render_html(card, radar_size=320, include_spec_link=True):
    return _aicard.render_html(_text(card), radar_size, include_spec_link)


def render_summary(card):
    return _aicard.render_summary(_text(card))


def diff(old, new):
    return _json.loads(_aicard.diff(_text(old), _text(new)))
