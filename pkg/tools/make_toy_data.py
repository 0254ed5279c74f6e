"""Regenerate the toy English-French data shipped in src/wordconf/data/toy/.

The bitext comes from a small phrase grammar with deterministic word
translations (French adjectives agree with their noun and follow it).
Hypotheses are fresh grammar outputs in which some French tokens are
replaced by a random vocabulary word or by the wrongly inflected adjective;
those tokens are labelled 0.

    python tools/make_toy_data.py
"""

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "wordconf" / "data" / "toy"

# english, french, gender, lexicon tags of the french form
NOUNS = [
    ("commission", "commission", "f"),
    ("council", "conseil", "m"),
    ("parliament", "parlement", "m"),
    ("policy", "politique", "f"),
    ("security", "sécurité", "f"),
    ("report", "rapport", "m"),
    ("proposal", "proposition", "f"),
    ("market", "marché", "m"),
    ("agreement", "accord", "m"),
    ("strategy", "stratégie", "f"),
    ("budget", "budget", "m"),
    ("debate", "débat", "m"),
]
# english, french masculine, french feminine
ADJECTIVES = [
    ("common", "commun", "commune"),
    ("foreign", "étranger", "étrangère"),
    ("economic", "économique", "économique"),
    ("european", "européen", "européenne"),
    ("new", "nouveau", "nouvelle"),
    ("final", "final", "finale"),
    ("social", "social", "sociale"),
]
VERBS = [
    ("supports", "soutient", "ip"),
    ("rejects", "rejette", "ip"),
    ("adopts", "adopte", "ip"),
    ("examines", "examine", "ip"),
    ("was", "était", "ii"),
    ("approves", "approuve", "ip"),
]
DET = {("the", "m"): "le", ("the", "f"): "la", ("a", "m"): "un", ("a", "f"): "une"}


def noun_phrase(rng):
    det = rng.choice(["the", "a"])
    en_n, fr_n, g = rng.choice(NOUNS)
    en, fr = [det], [DET[det, g]]
    if rng.random() < 0.6:
        en_a, fr_m, fr_f = rng.choice(ADJECTIVES)
        en += [en_a, en_n]
        fr += [fr_n, fr_f if g == "f" else fr_m]
    else:
        en.append(en_n)
        fr.append(fr_n)
    if rng.random() < 0.25:
        en_n2, fr_n2, g2 = rng.choice(NOUNS)
        en += ["of", "the", en_n2]
        fr += ["de", DET["the", g2], fr_n2]
    return en, fr


def sentence(rng):
    if rng.random() < 0.2:
        en_np, fr_np = noun_phrase(rng)
        return ["we", "are", "for"] + en_np, ["nous", "sommes", "pour"] + fr_np
    en_s, fr_s = noun_phrase(rng)
    en_v, fr_v, _ = rng.choice(VERBS)
    en_o, fr_o = noun_phrase(rng)
    return en_s + [en_v] + en_o, fr_s + [fr_v] + fr_o


def lexicon_lines():
    lines = []
    for _, fr, g in NOUNS:
        lines.append((fr, f"N,-,{g}S"))
    lines.append(("politique", "A,-,fS"))
    for _, m, f in ADJECTIVES:
        lines.append((m, "A,-,mS"))
        lines.append((f, "A,-,fS"))
    for _, fr, tense in VERBS:
        lines.append((fr, f"V,{tense},3S"))
    lines += [
        ("le", "D,-,mS"), ("la", "D,-,fS"), ("un", "D,-,mS"), ("une", "D,-,fS"),
        ("de", "P,-,-"), ("pour", "P,-,-"), ("nous", "PRO,-,1P"),
        ("sommes", "V,ip,1P"), ("sommes", "N,-,fP"),
    ]
    return lines


def main():
    rng = random.Random(20081001)
    OUT.mkdir(parents=True, exist_ok=True)
    train = [sentence(rng) for _ in range(400)]
    with open(OUT / "train.en", "w", encoding="utf-8") as en_f, open(OUT / "train.fr", "w", encoding="utf-8") as fr_f:
        for en, fr in train:
            en_f.write(" ".join(en) + "\n")
            fr_f.write(" ".join(fr) + "\n")

    fr_vocab = sorted({w for _, fr in train for w in fr})
    adj_swap = {}
    for _, m, f in ADJECTIVES:
        if m != f:
            adj_swap[m], adj_swap[f] = f, m
    with open(OUT / "dev.en", "w", encoding="utf-8") as en_f, \
            open(OUT / "dev.fr", "w", encoding="utf-8") as fr_f, \
            open(OUT / "dev.lab", "w", encoding="utf-8") as lab_f:
        for _ in range(120):
            en, fr = sentence(rng)
            labels = []
            hyp = []
            for w in fr:
                r = rng.random()
                if r < 0.08 and w in adj_swap:
                    hyp.append(adj_swap[w])
                    labels.append("0")
                elif r < 0.22:
                    sub = rng.choice([v for v in fr_vocab if v != w])
                    hyp.append(sub)
                    labels.append("0")
                else:
                    hyp.append(w)
                    labels.append("1")
            en_f.write(" ".join(en) + "\n")
            fr_f.write(" ".join(hyp) + "\n")
            lab_f.write(" ".join(labels) + "\n")

    with open(OUT / "lexicon.fr.tsv", "w", encoding="utf-8") as fh:
        for word, tag in lexicon_lines():
            fh.write(f"{word}\t{tag}\n")
    with open(OUT / "toolwords.txt", "w", encoding="utf-8") as fh:
        for w in ["the", "a", "of", "le", "la", "un", "une", "de"]:
            fh.write(w + "\n")


if __name__ == "__main__":
    main()
