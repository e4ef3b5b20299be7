#!/usr/bin/env python3
"""Write a small interview-ready dataset (entities/triples/popularity CSVs)
for the end-to-end frontend test. Usage: fixture.py <out_dir>"""

import random
import sys
from pathlib import Path

out = Path(sys.argv[1])
out.mkdir(parents=True, exist_ok=True)
rng = random.Random(7)

n_movies, n_genres, n_people = 80, 8, 24
entities = [(f"m{i}", f"Movie {i}", "Movie", "true") for i in range(n_movies)]
entities += [(f"g{i}", f"Genre {i}", "Genre", "false") for i in range(n_genres)]
entities += [(f"p{i}", f"Person {i}", "Person", "false") for i in range(n_people)]

triples = []
for i in range(n_movies):
    for g in rng.sample(range(n_genres), 2):
        triples.append((f"m{i}", "HAS_GENRE", f"g{g}"))
    for p in rng.sample(range(n_people), 2):
        triples.append((f"m{i}", "STARRING", f"p{p}"))

(out / "entities.csv").write_text(
    "uri,name,kind,recommendable\n"
    + "".join(f"{u},{n},{k},{r}\n" for u, n, k, r in entities)
)
(out / "triples.csv").write_text(
    "head_uri,relation,tail_uri\n" + "".join(f"{h},{r},{t}\n" for h, r, t in triples)
)
(out / "triples.csv.relations").write_text("HAS_GENRE\nSTARRING\n")
(out / "popularity.csv").write_text(
    "entity_uri,external_rating_count,release_year\n"
    + "".join(
        f"m{i},{rng.randint(5, 400)},{rng.randint(1970, 2019)}\n" for i in range(n_movies)
    )
)
print(out)
