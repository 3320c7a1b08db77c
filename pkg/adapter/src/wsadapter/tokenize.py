"""Word tokenization and heuristic POS tagging.

English text splits on whitespace with punctuation broken out; Japanese
text splits into runs of a single script class (kanji, hiragana, katakana,
latin, punctuation). The tagger is a closed-class lexicon: good enough to
mark function words for filtering, not a linguistic analysis.
"""

from __future__ import annotations

import re
import unicodedata

# Tags treated as function words; must stay in sync with the engine's
# documented default filter set.
FUNCTION_POS = frozenset(
    {"ADP", "AUX", "CCONJ", "SCONJ", "DET", "PART", "PRON", "PUNCT", "SYM"}
)

_EN_TOKEN = re.compile(r"[A-Za-z0-9']+|[^\sA-Za-z0-9']")
_EN_LEXICON = {
    "DET": {"the", "a", "an", "this", "that", "these", "those", "each", "every",
            "some", "any", "no", "another", "both", "either", "neither"},
    "ADP": {"of", "in", "on", "at", "by", "for", "with", "from", "about", "into",
            "over", "under", "between", "through", "during", "against", "across",
            "near", "after", "before", "without", "within", "toward", "towards",
            "upon", "among", "along", "around", "out", "off", "up", "down"},
    "PRON": {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
             "us", "them", "my", "your", "his", "its", "our", "their", "mine",
             "yours", "hers", "ours", "theirs", "myself", "yourself", "himself",
             "herself", "itself", "ourselves", "themselves", "who", "whom",
             "whose", "which", "what", "something", "anything", "nothing",
             "everything", "someone", "anyone", "everyone"},
    "AUX": {"is", "am", "are", "was", "were", "be", "been", "being", "have",
            "has", "had", "having", "do", "does", "did", "will", "would",
            "shall", "should", "may", "might", "must", "can", "could"},
    "CCONJ": {"and", "or", "but", "nor", "yet"},
    "SCONJ": {"if", "because", "while", "although", "though", "since", "unless",
              "whereas", "whether"},
    "PART": {"to", "not", "n't"},
}

_JA_PARTICLES = {"は", "が", "を", "に", "で", "と", "へ", "も", "や", "か",
                 "の", "ね", "よ", "な", "から", "まで", "より"}
_JA_AUX = {"です", "ます", "でした", "ました", "だ", "である", "います", "いる",
           "ある", "れる", "られる", "せる", "させる"}


def _char_class(ch: str) -> str:
    code = ord(ch)
    if 0x4E00 <= code <= 0x9FFF or ch in "々〆ヶ":
        return "kanji"
    if 0x3040 <= code <= 0x309F:
        return "hiragana"
    if 0x30A0 <= code <= 0x30FF or ch == "ー":
        return "katakana"
    if ch.isalnum():
        return "latin"
    return "punct"


def tokenize_words(text: str, lang: str) -> list[str]:
    text = text.strip()
    if not text:
        return []
    if lang == "ja":
        tokens: list[str] = []
        current, current_class = "", None
        for ch in text:
            if ch.isspace():
                if current:
                    tokens.append(current)
                current, current_class = "", None
                continue
            cls = _char_class(ch)
            if cls == current_class:
                current += ch
            else:
                if current:
                    tokens.append(current)
                current, current_class = ch, cls
        if current:
            tokens.append(current)
        return tokens
    return _EN_TOKEN.findall(text)


def _is_punct(token: str) -> bool:
    return all(unicodedata.category(ch).startswith(("P", "S")) for ch in token)


def _tag_en(token: str) -> str:
    if _is_punct(token):
        return "PUNCT"
    lowered = token.lower()
    for tag, words in _EN_LEXICON.items():
        if lowered in words:
            return tag
    if lowered.isdigit():
        return "NUM"
    return "NOUN"


def _tag_ja(token: str) -> str:
    if _is_punct(token):
        return "PUNCT"
    if token in _JA_PARTICLES:
        return "ADP"
    if token in _JA_AUX:
        return "AUX"
    if token.isdigit():
        return "NUM"
    return "NOUN"


def pos_tag(words: list[str], lang: str) -> list[tuple[str, bool]]:
    """(tag, is_function) per word; is_function mirrors the engine's POS set."""
    tag = _tag_ja if lang == "ja" else _tag_en
    tags = [tag(w) for w in words]
    return [(t, t in FUNCTION_POS) for t in tags]
