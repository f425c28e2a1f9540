"""Hand-built inverse problems: (case, direction, H, G).

Direction "right" asks for F with G @ F = H, "left" for F with F @ G = H.
Cases follow the three clauses of the right inverse and their mirrors.
"""

CURATED = [
    # clause 1: G = \v. v @ J, delegate to the other direction
    ("type-raised", "right", "answer(river(loc_2(stateid('arkansas'))))",
     r"\v. v @ river(loc_2(stateid('arkansas')))"),
    ("type-raised", "right", "population_1(stateid('texas'))", r"\v. v @ stateid('texas')"),
    ("type-raised", "left", "answer(city(loc_2(stateid('ohio'))))",
     r"\v. v @ (\x. city(loc_2(x)))"),
    ("type-raised", "left", "answer(state(all))", r"\v. v @ (\x. state(x))"),
    # clause 2: G = \v. H(J : v), the unknown is J itself
    ("subterm", "right", "river(loc_2(stateid('arkansas')))", r"\x. river(x)"),
    ("subterm", "right", "answer(lake(loc_2(countryid('usa'))))", r"\x. answer(lake(x))"),
    ("subterm", "right", "exclude(state(all), next_to_2(state(all)))",
     r"\x. exclude(x, next_to_2(x))"),
    ("subterm", "right", "answer(elevation_1(placeid('mount mckinley')))",
     r"\x. answer(elevation_1(x))"),
    ("subterm", "left", "answer(river(loc_2(stateid('arkansas'))))",
     "river(loc_2(stateid('arkansas')))"),
    ("subterm", "left", r"\y. y @ loc_2(stateid('arkansas'))", "stateid('arkansas')"),
    ("subterm", "left", "answer(population_1(stateid('new york')))", "'new york'"),
    ("subterm", "left", "next_to_2(state(all))", "state(all)"),
    ("subterm", "right", "'utah'", r"\v. v"),
    # clause 3: the unknown is a function the known side applies
    ("schematic", "right", "answer(river(loc_2(stateid('texas'))))",
     r"\w. answer(w @ stateid('texas'))"),
    ("schematic", "right", "answer(city(loc_2(stateid('utah'))))",
     r"\w. answer(city(w @ 'utah'))"),
    ("schematic", "right", "exclude(state(all), next_to_2(stateid('ohio')))",
     r"\w. exclude(state(all), w @ stateid('ohio'))"),
    ("schematic", "left", "answer(river(loc_2(stateid('kansas'))))", r"\x. river(x)"),
    ("schematic", "left", "answer(lake(loc_2(countryid('usa'))))", r"\x. loc_2(x)"),
    ("schematic", "left", "answer(exclude(state(all), next_to_2(state(all))))",
     r"\x. next_to_2(x)"),
    ("schematic", "left", "state(next_to_2(stateid('texas')))", r"\x. \y. y @ stateid(x)"),
]
