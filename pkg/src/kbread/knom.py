"""Relation extraction from compound nouns via semantic type sequences.

Compound nouns ("japanese astronaut soichi noguchi") contain no verbs, so
relations they express are mined structurally: each token is replaced by
its knowledge-base categories to form type sequences, sequences with enough
distinct supporting compounds are kept, and known relation instances among
supporter token pairs turn sequences into position-annotated relation
mappings. Applying the mappings to fresh compounds yields new relation
instances. A type-free baseline is produced by wildcarding the type
elements of each mapping.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, replace

from .kb import KnowledgeBase
from .tsv import FormatError, iter_rows, norm_token

#: Sequence element kinds: a category name, a literal word, or a wildcard.
TYPE, LEX, ANY = "type", "lex", "any"

DEFAULT_MIN_SUPPORT = 10


@dataclass(frozen=True)
class CompoundNoun:
    tokens: tuple[str, ...]
    source: str

    def __post_init__(self):
        if len(self.tokens) < 2:
            raise ValueError("a compound noun needs at least two tokens")


@dataclass(frozen=True)
class TypeSequence:
    """Ordered elements, each a (kind, value) pair; kind is "type" for a
    category, "lex" for a literal token kept as an anchor, or "any" for a
    baseline wildcard."""

    elements: tuple[tuple[str, str], ...]
    support: int = 0


@dataclass(frozen=True)
class MinedSequence:
    sequence: TypeSequence
    supporters: tuple[CompoundNoun, ...]


@dataclass(frozen=True)
class TypeSequenceMapping:
    relation: str
    arg1_pos: int
    arg2_pos: int
    sequence: TypeSequence
    support: int


@dataclass(frozen=True)
class Prediction:
    relation: str
    arg1: str
    arg2: str
    source: str
    known: bool


def type_compound(cn: CompoundNoun, kb: KnowledgeBase) -> list[TypeSequence]:
    """All candidate type sequences for one compound.

    Each token contributes one choice per category; tokens with no
    categories stay as literal anchors. Candidates are the product of the
    per-token choices, in deterministic order.
    """
    choices = []
    for token in cn.tokens:
        token = norm_token(token)
        types = sorted(kb.types_of(token))
        choices.append([(TYPE, t) for t in types] or [(LEX, token)])
    return [TypeSequence(combo) for combo in itertools.product(*choices)]


def mine_sequences(corpus, kb: KnowledgeBase,
                   min_support: int = DEFAULT_MIN_SUPPORT) -> list[MinedSequence]:
    """Aggregate candidate sequences over a corpus and keep those with at
    least ``min_support`` distinct supporting compounds."""
    support = {}
    for cn in corpus:
        for seq in type_compound(cn, kb):
            support.setdefault(seq.elements, {})[cn.source] = cn
    mined = []
    for elements in sorted(support):
        by_source = support[elements]
        if len(by_source) < min_support:
            continue
        supporters = tuple(by_source[s] for s in sorted(by_source))
        mined.append(MinedSequence(TypeSequence(elements, len(supporters)), supporters))
    return mined


def learn_mappings(mined, kb: KnowledgeBase,
                   min_support: int = DEFAULT_MIN_SUPPORT) -> list[TypeSequenceMapping]:
    """Distantly supervise sequence-to-relation mappings.

    For every mined sequence and ordered position pair (i, j), the support
    is the number of supporting compounds whose (token_i, token_j) is a
    known instance of the relation; each supporter counts once per
    (relation, i, j). Mappings below ``min_support`` are dropped.
    """
    out = []
    for m in mined:
        length = len(m.sequence.elements)
        counts = Counter()
        for cn in m.supporters:
            tokens = [norm_token(t) for t in cn.tokens]
            for i, j in itertools.permutations(range(1, length + 1), 2):
                for rel in kb.relations_between(tokens[i - 1], tokens[j - 1]):
                    counts[(rel, i, j)] += 1
        for (rel, i, j), c in sorted(counts.items()):
            if c >= min_support:
                out.append(TypeSequenceMapping(rel, i, j, m.sequence, c))
    out.sort(key=lambda mp: (mp.relation, mp.sequence.elements, mp.arg1_pos, mp.arg2_pos))
    return out


def _matches(cn: CompoundNoun, seq: TypeSequence, kb: KnowledgeBase) -> bool:
    if len(cn.tokens) != len(seq.elements):
        return False
    for token, (kind, value) in zip(cn.tokens, seq.elements):
        token = norm_token(token)
        if kind == TYPE:
            if value not in kb.types_of(token):
                return False
        elif kind == LEX:
            if token != value:
                return False
        elif kind != ANY:
            raise ValueError(f"unknown sequence element kind {kind!r}")
    return True


def predict_instances(mappings, corpus, kb: KnowledgeBase) -> list[Prediction]:
    """Apply mappings to compounds, yielding deduplicated relation instances.

    Each matching compound contributes relation(token at arg1_pos, token at
    arg2_pos). Duplicate (relation, arg1, arg2) triples collapse to one
    prediction with the smallest source id; instances already in the
    knowledge base are flagged as known. Output is sorted, so it depends
    only on the inputs, not on corpus order.
    """
    found = {}
    for cn in corpus:
        for mp in mappings:
            if not _matches(cn, mp.sequence, kb):
                continue
            arg1 = norm_token(cn.tokens[mp.arg1_pos - 1])
            arg2 = norm_token(cn.tokens[mp.arg2_pos - 1])
            key = (mp.relation, arg1, arg2)
            if key not in found or cn.source < found[key]:
                found[key] = cn.source
    preds = []
    for (rel, arg1, arg2), source in sorted(found.items()):
        known = (arg1, arg2) in kb.relation_pairs(rel)
        preds.append(Prediction(rel, arg1, arg2, source, known))
    return preds


def baseline_mappings(mappings) -> list[TypeSequenceMapping]:
    """Type-free variants of the mappings: category elements become
    wildcards, and mappings whose sequences end up all-wildcard (no lexical
    anchor survives) are discarded as too permissive."""
    best = {}
    for mp in mappings:
        elements = tuple((ANY, "*") if kind == TYPE else (kind, value)
                         for kind, value in mp.sequence.elements)
        if all(kind == ANY for kind, _ in elements):
            continue
        key = (mp.relation, mp.arg1_pos, mp.arg2_pos, elements)
        cur = best.get(key)
        if cur is None or mp.support > cur.support:
            best[key] = replace(mp, sequence=TypeSequence(elements, mp.sequence.support))
    return sorted(best.values(),
                  key=lambda mp: (mp.relation, mp.sequence.elements, mp.arg1_pos, mp.arg2_pos))


def sample_predictions(predictions, size: int = 100, seed: int = 0) -> list[Prediction]:
    """Uniform sample (without replacement) for manual precision annotation."""
    predictions = list(predictions)
    if len(predictions) <= size:
        return predictions
    return random.Random(seed).sample(predictions, size)


# -- files ---------------------------------------------------------------


def read_compounds(path) -> list[CompoundNoun]:
    """Read compounds as TSV: id, token, token, ... (two or more tokens)."""
    out = []
    for lineno, fields in iter_rows(path):
        if len(fields) < 3:
            raise FormatError(path, lineno, f"expected id plus >= 2 tokens, got {len(fields)} columns")
        tokens = tuple(norm_token(f) for f in fields[1:])
        if not fields[0] or not all(tokens):
            raise FormatError(path, lineno, "empty field")
        out.append(CompoundNoun(tokens, fields[0]))
    return out


def _format_element(element) -> str:
    kind, value = element
    return f"{kind}:{value}"


def _parse_element(text, path, lineno):
    kind, sep, value = text.partition(":")
    if not sep or kind not in (TYPE, LEX, ANY) or not value:
        raise FormatError(path, lineno, f"bad sequence element {text!r}")
    return kind, value


def write_sequences(mined, path) -> None:
    """Mined sequences as TSV: sequence, support, supporter ids."""
    lines = []
    for m in mined:
        seq = " ".join(_format_element(e) for e in m.sequence.elements)
        ids = ",".join(cn.source for cn in m.supporters)
        lines.append(f"{seq}\t{m.sequence.support}\t{ids}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def write_mappings(mappings, path) -> None:
    """Mappings as TSV: relation, arg1 pos, arg2 pos, sequence, support."""
    lines = []
    for mp in mappings:
        seq = " ".join(_format_element(e) for e in mp.sequence.elements)
        lines.append(f"{mp.relation}\t{mp.arg1_pos}\t{mp.arg2_pos}\t{seq}\t{mp.support}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def read_mappings(path) -> list[TypeSequenceMapping]:
    out = []
    for lineno, fields in iter_rows(path):
        if len(fields) != 5:
            raise FormatError(path, lineno, f"expected 5 columns, got {len(fields)}")
        try:
            arg1_pos, arg2_pos = int(fields[1]), int(fields[2])
            support = int(fields[4])
        except ValueError:
            raise FormatError(path, lineno, "positions and support must be integers") from None
        elements = tuple(_parse_element(e, path, lineno) for e in fields[3].split())
        if not elements:
            raise FormatError(path, lineno, "empty sequence")
        length = len(elements)
        if (arg1_pos == arg2_pos or not 1 <= arg1_pos <= length
                or not 1 <= arg2_pos <= length):
            raise FormatError(path, lineno, "argument positions out of range")
        out.append(TypeSequenceMapping(norm_token(fields[0]), arg1_pos, arg2_pos,
                                       TypeSequence(elements, support), support))
    return out


def write_predictions(predictions, path) -> None:
    """Predictions as TSV: relation, arg1, arg2, source id, known|new."""
    lines = [f"{p.relation}\t{p.arg1}\t{p.arg2}\t{p.source}\t{'known' if p.known else 'new'}"
             for p in predictions]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def write_sample_manifest(predictions, path) -> None:
    """Annotation manifest: prediction rows plus an empty judgment column."""
    lines = ["#relation\targ1\targ2\tsource\tstatus\tjudgment"]
    lines += [f"{p.relation}\t{p.arg1}\t{p.arg2}\t{p.source}\t{'known' if p.known else 'new'}\t-"
              for p in predictions]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
