"""English Snowball stemmer (the "Porter2" algorithm).

Standalone implementation so stemmed output is frozen with the package
rather than drifting with an external toolkit release. The algorithm
works on lowercase ASCII words; anything of length <= 2 is returned
unchanged. tests/data/porter2_pairs.txt pins the expected output for a
vocabulary covering every rule branch.
"""

from __future__ import annotations

_VOWELS = "aeiouy"
_DOUBLE_CONSONANTS = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_LI_ENDING = "cdeghkmnrt"

_STEP0_SUFFIXES = ("'s'", "'s", "'")
_STEP1A_SUFFIXES = ("sses", "ied", "ies", "us", "ss", "s")
_STEP1B_SUFFIXES = ("eedly", "ingly", "edly", "eed", "ing", "ed")
_STEP2_SUFFIXES = (
    "ization", "ational", "fulness", "ousness", "iveness", "tional",
    "biliti", "lessli", "entli", "ation", "alism", "aliti", "ousli",
    "iviti", "fulli", "enci", "anci", "abli", "izer", "ator", "alli",
    "bli", "ogi", "li",
)
_STEP3_SUFFIXES = (
    "ational", "tional", "alize", "icate", "iciti", "ative", "ical",
    "ness", "ful",
)
_STEP4_SUFFIXES = (
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
    "ism", "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic",
)

# Irregular forms and short words that the suffix rules would mangle.
_SPECIAL_WORDS = {
    "skis": "ski", "skies": "sky",
    "dying": "die", "lying": "lie", "tying": "tie",
    "idly": "idl", "gently": "gentl", "ugly": "ugli", "early": "earli",
    "only": "onli", "singly": "singl",
    "sky": "sky", "news": "news", "howe": "howe",
    "atlas": "atlas", "cosmos": "cosmos", "bias": "bias", "andes": "andes",
    "inning": "inning", "innings": "inning",
    "outing": "outing", "outings": "outing",
    "canning": "canning", "cannings": "canning",
    "herring": "herring", "herrings": "herring",
    "earring": "earring", "earrings": "earring",
    "proceed": "proceed", "proceeds": "proceed",
    "proceeded": "proceed", "proceeding": "proceed",
    "exceed": "exceed", "exceeds": "exceed",
    "exceeded": "exceed", "exceeding": "exceed",
    "succeed": "succeed", "succeeds": "succeed",
    "succeeded": "succeed", "succeeding": "succeed",
}


def _replace_suffix(word: str, suffix: str, replacement: str) -> str:
    return word[: -len(suffix)] + replacement


def _r1_r2(word: str) -> tuple[str, str]:
    """R1: region after the first non-vowel that follows a vowel; R2: same rule applied inside R1."""
    r1 = ""
    r2 = ""
    for i in range(1, len(word)):
        if word[i] not in _VOWELS and word[i - 1] in _VOWELS:
            r1 = word[i + 1:]
            break
    for i in range(1, len(r1)):
        if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
            r2 = r1[i + 1:]
            break
    return r1, r2


def stem(word: str) -> str:
    """Return the Porter2 stem of an English word (lowercased)."""
    word = word.lower()

    if len(word) <= 2:
        return word
    if word in _SPECIAL_WORDS:
        return _SPECIAL_WORDS[word]

    # Normalize typographic apostrophes, then drop a leading one.
    word = word.replace("’", "'").replace("‘", "'").replace("‛", "'")
    if word.startswith("'"):
        word = word[1:]

    # Mark consonant-y with an uppercase Y so it is not treated as a vowel.
    if word.startswith("y"):
        word = "Y" + word[1:]
    for i in range(1, len(word)):
        if word[i - 1] in _VOWELS and word[i] == "y":
            word = word[:i] + "Y" + word[i + 1:]

    if word.startswith(("gener", "commun", "arsen")):
        r1 = word[5:] if word.startswith(("gener", "arsen")) else word[6:]
        r2 = ""
        for i in range(1, len(r1)):
            if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
                r2 = r1[i + 1:]
                break
    else:
        r1, r2 = _r1_r2(word)

    # Step 0: possessive endings.
    for suffix in _STEP0_SUFFIXES:
        if word.endswith(suffix):
            word = word[: -len(suffix)]
            r1 = r1[: -len(suffix)]
            r2 = r2[: -len(suffix)]
            break

    # Step 1a: plural-like endings.
    for suffix in _STEP1A_SUFFIXES:
        if word.endswith(suffix):
            if suffix == "sses":
                word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            elif suffix in ("ied", "ies"):
                if len(word[: -len(suffix)]) > 1:
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                else:
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
            elif suffix == "s":
                if any(ch in _VOWELS for ch in word[:-2]):
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
            # "us" and "ss" match but are left alone.
            break

    # Step 1b: -ed / -ing endings.
    for suffix in _STEP1B_SUFFIXES:
        if word.endswith(suffix):
            if suffix in ("eed", "eedly"):
                if r1.endswith(suffix):
                    word = _replace_suffix(word, suffix, "ee")
                    r1 = _replace_suffix(r1, suffix, "ee") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ee") if len(r2) >= len(suffix) else ""
            elif any(ch in _VOWELS for ch in word[: -len(suffix)]):
                word = word[: -len(suffix)]
                r1 = r1[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                if word.endswith(("at", "bl", "iz")):
                    word += "e"
                    r1 += "e"
                    if len(word) > 5 or len(r1) >= 3:
                        r2 += "e"
                elif word.endswith(_DOUBLE_CONSONANTS):
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                elif (
                    r1 == ""
                    and len(word) >= 3
                    and word[-1] not in _VOWELS
                    and word[-1] not in "wxY"
                    and word[-2] in _VOWELS
                    and word[-3] not in _VOWELS
                ) or (
                    r1 == ""
                    and len(word) == 2
                    and word[0] in _VOWELS
                    and word[1] not in _VOWELS
                ):
                    # Short word: restore a final e (e.g. hop-ing -> hope).
                    word += "e"
                    if len(r1) > 0:
                        r1 += "e"
                    if len(r2) > 0:
                        r2 += "e"
            break

    # Step 1c: final y after a consonant becomes i.
    if len(word) > 2 and word[-1] in "yY" and word[-2] not in _VOWELS:
        word = word[:-1] + "i"
        r1 = r1[:-1] + "i" if len(r1) >= 1 else ""
        r2 = r2[:-1] + "i" if len(r2) >= 1 else ""

    # Step 2: derivational suffixes, applied in R1.
    for suffix in _STEP2_SUFFIXES:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("enci", "anci", "abli"):
                    word = word[:-1] + "e"
                    r1 = r1[:-1] + "e" if len(r1) >= 1 else ""
                    r2 = r2[:-1] + "e" if len(r2) >= 1 else ""
                elif suffix == "entli":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("izer", "ization"):
                    word = _replace_suffix(word, suffix, "ize")
                    r1 = _replace_suffix(r1, suffix, "ize") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ize") if len(r2) >= len(suffix) else ""
                elif suffix in ("ational", "ation", "ator"):
                    word = _replace_suffix(word, suffix, "ate")
                    r1 = _replace_suffix(r1, suffix, "ate") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ate") if len(r2) >= len(suffix) else "e"
                elif suffix in ("alism", "aliti", "alli"):
                    word = _replace_suffix(word, suffix, "al")
                    r1 = _replace_suffix(r1, suffix, "al") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "al") if len(r2) >= len(suffix) else ""
                elif suffix == "fulness":
                    word, r1, r2 = word[:-4], r1[:-4], r2[:-4]
                elif suffix in ("ousli", "ousness"):
                    word = _replace_suffix(word, suffix, "ous")
                    r1 = _replace_suffix(r1, suffix, "ous") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ous") if len(r2) >= len(suffix) else ""
                elif suffix in ("iveness", "iviti"):
                    word = _replace_suffix(word, suffix, "ive")
                    r1 = _replace_suffix(r1, suffix, "ive") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ive") if len(r2) >= len(suffix) else "e"
                elif suffix in ("biliti", "bli"):
                    word = _replace_suffix(word, suffix, "ble")
                    r1 = _replace_suffix(r1, suffix, "ble") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ble") if len(r2) >= len(suffix) else ""
                elif suffix == "ogi" and word[-4] == "l":
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                elif suffix in ("fulli", "lessli"):
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "li" and word[-3] in _LI_ENDING:
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            break

    # Step 3: more derivational suffixes, applied in R1 (one in R2).
    for suffix in _STEP3_SUFFIXES:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "ational":
                    word = _replace_suffix(word, suffix, "ate")
                    r1 = _replace_suffix(r1, suffix, "ate") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ate") if len(r2) >= len(suffix) else ""
                elif suffix == "alize":
                    word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                elif suffix in ("icate", "iciti", "ical"):
                    word = _replace_suffix(word, suffix, "ic")
                    r1 = _replace_suffix(r1, suffix, "ic") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ic") if len(r2) >= len(suffix) else ""
                elif suffix in ("ful", "ness"):
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
                elif suffix == "ative" and r2.endswith(suffix):
                    word, r1, r2 = word[:-5], r1[:-5], r2[:-5]
            break

    # Step 4: residual suffixes, applied in R2.
    for suffix in _STEP4_SUFFIXES:
        if word.endswith(suffix):
            if r2.endswith(suffix):
                if suffix == "ion":
                    if word[-4] in "st":
                        word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                else:
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
            break

    # Step 5: final -e / -l cleanup.
    if r2.endswith("l") and word[-2] == "l":
        word = word[:-1]
    elif r2.endswith("e"):
        word = word[:-1]
    elif r1.endswith("e"):
        if len(word) >= 4 and (
            word[-2] in _VOWELS
            or word[-2] in "wxY"
            or word[-3] not in _VOWELS
            or word[-4] in _VOWELS
        ):
            word = word[:-1]

    return word.replace("Y", "y")
