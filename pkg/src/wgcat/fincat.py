"""Finite categories and functors, with the quotient functors q, p and the
discrete inclusion d.

All ids are strings.  Composition is written ``compose[(g, f)] = g after f``
and is stored as a total table on exactly the composable pairs.  Quotients
always pick the least id (string order) as class representative, so every
construction here is deterministic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import (
    AssociativityViolation,
    DanglingId,
    IdentityLawViolation,
    MissingIdentity,
    NotAnEquivalence,
    SchemaError,
    SegalNotIso,
    SimplicialIdentityViolation,
)


def key_of(*parts) -> str:
    """Deterministic compact encoding of structured ids."""
    return json.dumps(parts, separators=(",", ":"), sort_keys=False)


@dataclass(frozen=True)
class DiscreteSet:
    elements: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise SchemaError("duplicate elements in discrete set", elements=list(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements


@dataclass(eq=True)
class FinCat:
    objects: tuple[str, ...]
    morphisms: tuple[str, ...]
    src: dict
    tgt: dict
    identity: dict  # object id -> morphism id
    compose: dict  # (g, f) -> g∘f, for tgt(f) == src(g)

    def hom(self, a: str, b: str) -> list[str]:
        return [f for f in self.morphisms if self.src[f] == a and self.tgt[f] == b]

    def hom_map(self) -> dict:
        """(a, b) -> list of morphisms, computed in one pass."""
        out: dict = {}
        for f in self.morphisms:
            out.setdefault((self.src[f], self.tgt[f]), []).append(f)
        return out

    def is_identity(self, f: str) -> bool:
        return self.identity.get(self.src[f]) == f and self.src[f] == self.tgt[f]

    def iso_partner(self, f: str) -> str | None:
        """Two-sided inverse of f if one exists (exhaustive search)."""
        a, b = self.src[f], self.tgt[f]
        for g in self.hom(b, a):
            if self.compose[(g, f)] == self.identity[a] and self.compose[(f, g)] == self.identity[b]:
                return g
        return None

    def is_discrete(self) -> bool:
        return all(self.is_identity(f) for f in self.morphisms)

    def n_cells(self) -> int:
        return len(self.morphisms)


def make_fincat(objects, morphisms, src, tgt, identity, compose) -> FinCat:
    """Trusted constructor for internally built categories (no axiom re-check)."""
    return FinCat(tuple(objects), tuple(morphisms), dict(src), dict(tgt), dict(identity), dict(compose))


def validate_category(raw) -> FinCat:
    """Check the category axioms on a raw description, exhaustively.

    ``raw`` is either an unvalidated FinCat or a dict with keys
    objects / morphisms / identities / compose (the interchange form).
    Raises the structured error naming the first violated axiom.
    """
    if isinstance(raw, FinCat):
        c = raw
    else:
        try:
            objects = [str(o) for o in raw["objects"]]
            morphisms = [str(m["id"]) for m in raw["morphisms"]]
            src = {str(m["id"]): str(m["src"]) for m in raw["morphisms"]}
            tgt = {str(m["id"]): str(m["tgt"]) for m in raw["morphisms"]}
            identity = {str(k): str(v) for k, v in raw["identities"].items()}
            compose = {(str(g), str(f)): str(h) for g, f, h in raw["compose"]}
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed category description: {exc}") from exc
        c = FinCat(tuple(objects), tuple(morphisms), src, tgt, identity, compose)

    if len(set(c.objects)) != len(c.objects):
        raise SchemaError("duplicate object ids")
    if len(set(c.morphisms)) != len(c.morphisms):
        raise SchemaError("duplicate morphism ids")
    obj_set = set(c.objects)
    mor_set = set(c.morphisms)
    for f in c.morphisms:
        if c.src.get(f) not in obj_set or c.tgt.get(f) not in obj_set:
            raise DanglingId("morphism endpoint is not an object", morphism=f)
    for a in c.objects:
        e = c.identity.get(a)
        if e is None or e not in mor_set:
            raise MissingIdentity("object has no identity morphism", object=a)
        if c.src[e] != a or c.tgt[e] != a:
            raise MissingIdentity("identity morphism has wrong endpoints", object=a, morphism=e)

    composable = {(g, f) for f in c.morphisms for g in c.morphisms if c.tgt[f] == c.src[g]}
    declared = set(c.compose)
    if declared != composable:
        extra = sorted(declared - composable)
        missing = sorted(composable - declared)
        raise SchemaError(
            "composition table does not match the composable pairs",
            extra=extra[:3],
            missing=missing[:3],
        )
    for (g, f), h in c.compose.items():
        if h not in mor_set:
            raise DanglingId("composite is not a morphism", pair=[g, f], composite=h)
        if c.src[h] != c.src[f] or c.tgt[h] != c.tgt[g]:
            raise SchemaError("composite has wrong endpoints", pair=[g, f], composite=h)

    for f in c.morphisms:
        if c.compose[(c.identity[c.tgt[f]], f)] != f:
            raise IdentityLawViolation("left identity law fails", morphism=f)
        if c.compose[(f, c.identity[c.src[f]])] != f:
            raise IdentityLawViolation("right identity law fails", morphism=f)

    by_src: dict = {}
    for g in c.morphisms:
        by_src.setdefault(c.src[g], []).append(g)
    for f in c.morphisms:
        for g in by_src.get(c.tgt[f], ()):
            gf = c.compose[(g, f)]
            for h in by_src.get(c.tgt[g], ()):
                if c.compose[(h, gf)] != c.compose[(c.compose[(h, g)], f)]:
                    raise AssociativityViolation(
                        "associativity fails on a composable triple", triple=[h, g, f]
                    )
    return c


@dataclass(eq=True)
class FinFunctor:
    dom: FinCat
    cod: FinCat
    omap: dict
    mmap: dict

    def obj(self, a: str) -> str:
        return self.omap[a]

    def mor(self, f: str) -> str:
        return self.mmap[f]


def validate_functor(F: FinFunctor) -> FinFunctor:
    for a in F.dom.objects:
        if F.omap.get(a) not in set(F.cod.objects):
            raise SchemaError("object map misses an object", object=a)
    for f in F.dom.morphisms:
        g = F.mmap.get(f)
        if g not in set(F.cod.morphisms):
            raise SchemaError("morphism map misses a morphism", morphism=f)
        if F.cod.src[g] != F.omap[F.dom.src[f]] or F.cod.tgt[g] != F.omap[F.dom.tgt[f]]:
            raise SchemaError("functor does not preserve endpoints", morphism=f)
    for a in F.dom.objects:
        if F.mmap[F.dom.identity[a]] != F.cod.identity[F.omap[a]]:
            raise SchemaError("functor does not preserve identities", object=a)
    for (g, f), h in F.dom.compose.items():
        if F.cod.compose[(F.mmap[g], F.mmap[f])] != F.mmap[h]:
            raise SchemaError("functor does not preserve composition", pair=[g, f])
    return F


def identity_functor(c: FinCat) -> FinFunctor:
    return FinFunctor(c, c, {a: a for a in c.objects}, {f: f for f in c.morphisms})


def compose_functors(G: FinFunctor, F: FinFunctor) -> FinFunctor:
    assert F.cod is G.dom or F.cod == G.dom
    return FinFunctor(
        F.dom,
        G.cod,
        {a: G.omap[v] for a, v in F.omap.items()},
        {f: G.mmap[v] for f, v in F.mmap.items()},
    )


def functors_equal(F: FinFunctor, G: FinFunctor) -> bool:
    return F.omap == G.omap and F.mmap == G.mmap


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the least id as the root so representatives are canonical
            lo, hi = (rx, ry) if rx < ry else (ry, rx)
            self.parent[hi] = lo

    def classes(self) -> dict:
        return {x: self.find(x) for x in self.parent}


def q_projection(c: FinCat) -> tuple[DiscreteSet, dict]:
    """Path components with the projection map object -> least-id representative."""
    uf = _UnionFind(c.objects)
    for f in c.morphisms:
        uf.union(c.src[f], c.tgt[f])
    proj = uf.classes()
    reps = tuple(sorted(set(proj.values())))
    return DiscreteSet(reps), proj


def q_components(c: FinCat) -> DiscreteSet:
    return q_projection(c)[0]


def p_projection(c: FinCat) -> tuple[DiscreteSet, dict]:
    """Isomorphism classes with the projection map (least-id representatives)."""
    uf = _UnionFind(c.objects)
    for f in c.morphisms:
        if c.src[f] != c.tgt[f] and c.iso_partner(f) is not None:
            uf.union(c.src[f], c.tgt[f])
    proj = uf.classes()
    reps = tuple(sorted(set(proj.values())))
    return DiscreteSet(reps), proj


def p_isoclasses(c: FinCat) -> DiscreteSet:
    return p_projection(c)[0]


def discrete_cat(s: DiscreteSet | tuple | list) -> FinCat:
    elems = tuple(s.elements if isinstance(s, DiscreteSet) else s)
    ids = {a: key_of("id", a) for a in elems}
    return make_fincat(
        elems,
        tuple(ids[a] for a in elems),
        {ids[a]: a for a in elems},
        {ids[a]: a for a in elems},
        ids,
        {(ids[a], ids[a]): ids[a] for a in elems},
    )


@dataclass
class Verdict:
    ok: bool
    reason: str = ""
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def report(self) -> dict:
        return {"verdict": self.ok, "reason": self.reason, "witness": self.witness}


def iso_classes_of(c: FinCat) -> list[list[str]]:
    _, proj = p_projection(c)
    groups: dict = {}
    for a in c.objects:
        groups.setdefault(proj[a], []).append(a)
    return [sorted(groups[r]) for r in sorted(groups)]


def is_equivalence_of_cats(F: FinFunctor) -> Verdict:
    """Fully faithful + essentially surjective, checked exhaustively."""
    dom, cod = F.dom, F.cod
    cod_hom = cod.hom_map()
    dom_hom = dom.hom_map()
    for a in dom.objects:
        for b in dom.objects:
            image = [F.mmap[f] for f in dom_hom.get((a, b), ())]
            target = cod_hom.get((F.omap[a], F.omap[b]), [])
            if len(set(image)) != len(image):
                return Verdict(False, "not faithful", {"pair": [a, b]})
            if set(image) != set(target):
                return Verdict(False, "not full", {"pair": [a, b]})
    _, proj = p_projection(cod)
    hit = {proj[F.omap[a]] for a in dom.objects}
    for b in cod.objects:
        if proj[b] not in hit:
            return Verdict(False, "not essentially surjective", {"object": b})
    return Verdict(True)


def is_isomorphism_of_cats(F: FinFunctor) -> bool:
    return (
        len(set(F.omap.values())) == len(F.dom.objects) == len(F.cod.objects)
        and len(set(F.mmap.values())) == len(F.dom.morphisms) == len(F.cod.morphisms)
    )


def pullback_cat(F: FinFunctor, G: FinFunctor) -> tuple[FinCat, FinFunctor, FinFunctor]:
    """Strict fiber product of F and G over their shared codomain."""
    if not (F.cod == G.cod):
        raise SchemaError("pullback legs have different codomains")
    objs = [(a, b) for a in F.dom.objects for b in G.dom.objects if F.omap[a] == G.omap[b]]
    mors = [
        (f, g)
        for f in F.dom.morphisms
        for g in G.dom.morphisms
        if F.mmap[f] == G.mmap[g]
    ]
    oid = {ab: key_of(*ab) for ab in objs}
    mid = {fg: key_of(*fg) for fg in mors}
    src = {mid[(f, g)]: oid[(F.dom.src[f], G.dom.src[g])] for f, g in mors}
    tgt = {mid[(f, g)]: oid[(F.dom.tgt[f], G.dom.tgt[g])] for f, g in mors}
    identity = {oid[(a, b)]: mid[(F.dom.identity[a], G.dom.identity[b])] for a, b in objs}
    compose = {}
    by_src: dict = {}
    for f, g in mors:
        by_src.setdefault(src[mid[(f, g)]], []).append((f, g))
    for f1, g1 in mors:
        for f2, g2 in by_src.get(tgt[mid[(f1, g1)]], ()):
            compose[(mid[(f2, g2)], mid[(f1, g1)])] = mid[
                (F.dom.compose[(f2, f1)], G.dom.compose[(g2, g1)])
            ]
    p = make_fincat([oid[ab] for ab in objs], [mid[fg] for fg in mors], src, tgt, identity, compose)
    pr1 = FinFunctor(p, F.dom, {oid[(a, b)]: a for a, b in objs}, {mid[(f, g)]: f for f, g in mors})
    pr2 = FinFunctor(p, G.dom, {oid[(a, b)]: b for a, b in objs}, {mid[(f, g)]: g for f, g in mors})
    return p, pr1, pr2


def chain_pullback(factors, lmaps, rmaps):
    """Iterated fiber product X_1 x_B1 X_2 x_B2 ... x_B(k-1) X_k, as tuples.

    lmaps[j]: factors[j] -> bases[j] and rmaps[j]: factors[j+1] -> bases[j];
    a tuple is admissible when lmaps[j](u_j) == rmaps[j](u_{j+1}).
    Returns (category of tuples, [projection functors]).
    """
    k = len(factors)
    assert k >= 1 and len(lmaps) == len(rmaps) == k - 1

    def admissible(items, maps_attr):
        out = [(x,) for x in items[0]]
        for j in range(1, k):
            lm = getattr(lmaps[j - 1], maps_attr)
            rm = getattr(rmaps[j - 1], maps_attr)
            nxt = []
            for tup in out:
                for x in items[j]:
                    if lm[tup[-1]] == rm[x]:
                        nxt.append(tup + (x,))
            out = nxt
        return out

    objs = admissible([c.objects for c in factors], "omap")
    mors = admissible([c.morphisms for c in factors], "mmap")
    oid = {t: key_of(*t) for t in objs}
    mid = {t: key_of(*t) for t in mors}
    src = {mid[t]: oid[tuple(factors[j].src[t[j]] for j in range(k))] for t in mors}
    tgt = {mid[t]: oid[tuple(factors[j].tgt[t[j]] for j in range(k))] for t in mors}
    identity = {oid[t]: mid[tuple(factors[j].identity[t[j]] for j in range(k))] for t in objs}
    compose = {}
    by_src: dict = {}
    for t in mors:
        by_src.setdefault(src[mid[t]], []).append(t)
    for t1 in mors:
        for t2 in by_src.get(tgt[mid[t1]], ()):
            compose[(mid[t2], mid[t1])] = mid[tuple(factors[j].compose[(t2[j], t1[j])] for j in range(k))]
    cat = make_fincat([oid[t] for t in objs], [mid[t] for t in mors], src, tgt, identity, compose)
    projections = [
        FinFunctor(cat, factors[j], {oid[t]: t[j] for t in objs}, {mid[t]: t[j] for t in mors})
        for j in range(k)
    ]
    return cat, projections


def tuple_into_chain(chain: FinCat, components: list[FinFunctor]) -> FinFunctor:
    """Universal map into a chain_pullback from compatible component functors."""
    dom = components[0].dom
    omap = {a: key_of(*(c.omap[a] for c in components)) for a in dom.objects}
    mmap = {f: key_of(*(c.mmap[f] for c in components)) for f in dom.morphisms}
    return FinFunctor(dom, chain, omap, mmap)


# -- truncated nerves ---------------------------------------------------------


@dataclass
class TruncatedSSet:
    """Levels 0..m of a simplicial set with all generating faces/degeneracies."""

    m: int
    levels: list  # list of tuples of element ids
    faces: dict  # (k, i) -> dict, X_k -> X_{k-1}
    degens: dict  # (k, i) -> dict, X_k -> X_{k+1}

    def face(self, k: int, i: int, x):
        return self.faces[(k, i)][x]


def nerve_truncated(c: FinCat, m: int) -> TruncatedSSet:
    """Truncated nerve: level k is the set of k-long composable chains.

    Chains are (f1, ..., fk) with tgt(f_i) = src(f_{i+1}); a 1-chain is the
    plain morphism id and level 0 the plain object ids, so the nerve of a
    category round-trips exactly.
    """
    assert m >= 3
    levels: list = [tuple(c.objects), tuple(c.morphisms)]
    chains = {1: [(f,) for f in c.morphisms]}
    by_src: dict = {}
    for f in c.morphisms:
        by_src.setdefault(c.src[f], []).append(f)
    for k in range(2, m + 1):
        cur = []
        for chain in chains[k - 1]:
            for g in by_src.get(c.tgt[chain[-1]], ()):
                cur.append(chain + (g,))
        chains[k] = cur
        levels.append(tuple(key_of(*ch) for ch in cur))

    def elem(k, chain):
        if k == 0:
            return chain
        if k == 1:
            return chain[0]
        return key_of(*chain)

    faces: dict = {}
    degens: dict = {}
    faces[(1, 0)] = {f: c.tgt[f] for f in c.morphisms}
    faces[(1, 1)] = {f: c.src[f] for f in c.morphisms}
    degens[(0, 0)] = {a: c.identity[a] for a in c.objects}
    for k in range(2, m + 1):
        for i in range(k + 1):
            table = {}
            for chain in chains[k]:
                if i == 0:
                    out = chain[1:]
                elif i == k:
                    out = chain[:-1]
                else:
                    out = chain[: i - 1] + (c.compose[(chain[i], chain[i - 1])],) + chain[i + 1 :]
                table[elem(k, chain)] = elem(k - 1, out)
            faces[(k, i)] = table
    for k in range(1, m):
        for i in range(k + 1):
            table = {}
            for chain in chains[k]:
                anchor = c.src[chain[0]] if i == 0 else c.tgt[chain[i - 1]]
                out = chain[:i] + (c.identity[anchor],) + chain[i:]
                table[elem(k, chain)] = elem(k + 1, out)
            degens[(k, i)] = table
    return TruncatedSSet(m, levels, faces, degens)


def check_simplicial_identities(ns: TruncatedSSet, tag_associativity: bool = False):
    """Verify all simplicial identities expressible within the truncation."""
    m = ns.m

    def comp(t1, t2):
        return {x: t2[t1[x]] for x in t1}

    for k in range(2, m + 1):
        for j in range(k + 1):
            for i in range(j):
                lhs = comp(ns.faces[(k, j)], ns.faces[(k - 1, i)])
                rhs = comp(ns.faces[(k, i)], ns.faces[(k - 1, j - 1)])
                if lhs != rhs:
                    bad = next(x for x in lhs if lhs[x] != rhs[x])
                    if tag_associativity and k == 3 and (i, j) in ((1, 2),):
                        raise AssociativityViolation(
                            "level-3 faces are inconsistent with iterated composition",
                            simplex=bad,
                        )
                    raise SimplicialIdentityViolation(
                        "face identity d_i d_j = d_{j-1} d_i fails",
                        level=k,
                        i=i,
                        j=j,
                        witness_element=bad,
                    )
    for k in range(0, m - 1):
        for j in range(k + 1):
            for i in range(j + 1):
                lhs = comp(ns.degens[(k, j)], ns.degens[(k + 1, i)])
                rhs = comp(ns.degens[(k, i)], ns.degens[(k + 1, j + 1)])
                if lhs != rhs:
                    raise SimplicialIdentityViolation(
                        "degeneracy identity fails", level=k, i=i, j=j
                    )
    for k in range(1, m):
        for j in range(k):
            for i in range(k + 2):
                lhs = comp(ns.degens[(k, j)], ns.faces[(k + 1, i)])
                if i < j:
                    rhs = comp(ns.faces[(k, i)], ns.degens[(k - 1, j - 1)])
                elif i in (j, j + 1):
                    rhs = {x: x for x in ns.levels[k]}
                else:
                    rhs = comp(ns.faces[(k, i - 1)], ns.degens[(k - 1, j)])
                if lhs != rhs:
                    raise SimplicialIdentityViolation(
                        "mixed face/degeneracy identity fails", level=k, i=i, j=j
                    )


def nu_face_map(ns: TruncatedSSet, k: int, j: int) -> dict:
    """The map X_k -> X_1 induced by [1] -> [k], 0 -> j-1, 1 -> j."""
    table = {x: x for x in ns.levels[k]}
    level = k
    for _ in range(k - j):  # drop top vertices
        table = {x: ns.faces[(level, level)][table[x]] for x in table}
        level -= 1
    for _ in range(j - 1):  # drop leading vertices
        table = {x: ns.faces[(level, 0)][table[x]] for x in table}
        level -= 1
    return table


def segal_bijection_check(ns: TruncatedSSet, k: int) -> dict | None:
    """If the k-th Segal map of the simplicial set is a bijection, return the
    inverse (spine tuple -> element of X_k); otherwise None."""
    spines = {}
    nu = [nu_face_map(ns, k, j) for j in range(1, k + 1)]
    for x in ns.levels[k]:
        spines[x] = tuple(nu[j - 1][x] for j in range(1, k + 1))
    if len(set(spines.values())) != len(spines):
        return None
    expected = set()
    d0 = ns.faces[(1, 0)]
    d1 = ns.faces[(1, 1)]
    stubs = [(f,) for f in ns.levels[1]]
    for _ in range(k - 1):
        stubs = [t + (g,) for t in stubs for g in ns.levels[1] if d0[t[-1]] == d1[g]]
    expected = set(stubs)
    got = set(spines.values())
    if got != expected:
        return None
    return {v: x for x, v in spines.items()}


def cat_from_nerve(ns: TruncatedSSet) -> FinCat:
    """Reconstruct a category from a truncated simplicial set.

    Requires Segal bijections at 2..m; level 3 witnesses associativity.
    """
    if ns.m < 3:
        raise SchemaError("truncation must be at least 3", m=ns.m)
    check_simplicial_identities(ns, tag_associativity=True)
    for k in range(2, ns.m + 1):
        if segal_bijection_check(ns, k) is None:
            raise SegalNotIso("Segal map is not a bijection", level=k)
    spine2 = segal_bijection_check(ns, 2)
    objects = tuple(ns.levels[0])
    morphisms = tuple(ns.levels[1])
    src = {f: ns.faces[(1, 1)][f] for f in morphisms}
    tgt = {f: ns.faces[(1, 0)][f] for f in morphisms}
    identity = {a: ns.degens[(0, 0)][a] for a in objects}
    compose = {}
    for f in morphisms:
        for g in morphisms:
            if tgt[f] == src[g]:
                compose[(g, f)] = ns.faces[(2, 1)][spine2[(f, g)]]
    c = FinCat(objects, morphisms, src, tgt, identity, compose)
    for f in morphisms:
        if compose[(identity[tgt[f]], f)] != f or compose[(f, identity[src[f]])] != f:
            raise IdentityLawViolation("reconstructed table breaks an identity law", morphism=f)
    for f in morphisms:
        for g in morphisms:
            if tgt[f] != src[g]:
                continue
            for h in morphisms:
                if tgt[g] != src[h]:
                    continue
                if compose[(h, compose[(g, f)])] != compose[(compose[(h, g)], f)]:
                    raise AssociativityViolation(
                        "reconstructed table is not associative", triple=[h, g, f]
                    )
    return c
