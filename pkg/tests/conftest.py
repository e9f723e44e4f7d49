"""Shared hypothesis strategies for the exact-algebra test modules."""

from hypothesis import settings, strategies as st

from superjet import GrassmannElement, Polynomial, SuperFunction, SuperPoint

# algebra ops on bigger cases can exceed the default per-example deadline
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=3)
nonzero_fractions = small_fractions.filter(bool)


@st.composite
def grassmann_elements(draw, n=None, parity=None, max_terms=4):
    if n is None:
        n = draw(st.integers(min_value=1, max_value=4))
    masks = [m for m in range(1 << n) if parity is None or m.bit_count() & 1 == parity]
    picked = draw(st.lists(st.sampled_from(masks), max_size=max_terms))
    terms = {}
    for m in picked:
        terms[m] = terms.get(m, 0) + draw(small_fractions)
    return GrassmannElement(n, {m: c for m, c in terms.items() if c})


@st.composite
def polynomials(draw, p=None, degree=3, max_terms=3):
    if p is None:
        p = draw(st.integers(min_value=1, max_value=3))
    exponents = st.lists(
        st.integers(min_value=0, max_value=degree), min_size=p, max_size=p
    )
    terms = {}
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        e = tuple(draw(exponents))
        if sum(e) > degree:
            continue
        terms[e] = terms.get(e, 0) + draw(small_fractions)
    return Polynomial(p, {e: c for e, c in terms.items() if c})


@st.composite
def superfunctions(draw, p=None, q=None, degree=3):
    if p is None:
        p = draw(st.integers(min_value=1, max_value=2))
    if q is None:
        q = draw(st.integers(min_value=0, max_value=2))
    components = {}
    for mask in range(1 << q):
        if draw(st.booleans()):
            poly = draw(polynomials(p=p, degree=degree))
            if poly.terms:
                components[mask] = poly
    return SuperFunction(p, q, components)


@st.composite
def superpoints(draw, n=None, p=1, q=1):
    if n is None:
        n = draw(st.integers(min_value=1, max_value=3))
    even = [draw(grassmann_elements(n=n, parity=0)) for _ in range(p)]
    odd = [draw(grassmann_elements(n=n, parity=1)) for _ in range(q)]
    return SuperPoint(n, even, odd)
