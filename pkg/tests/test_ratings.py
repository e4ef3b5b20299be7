import numpy as np
import pytest

from kgrec.ratings import MR_BIN, RatingError, load_ratings, to_binary


def test_tiny_counts(tiny_store):
    assert tiny_store.n_users == 2
    assert tiny_store.n_ratings == 6
    assert len(tiny_store.entities_of(0)) == 3
    assert len(tiny_store.entities_of(1)) == 3


def test_duplicate_pair_rejected(tmp_path, tiny_files, tiny_graph):
    path = tmp_path / "dup.csv"
    path.write_text(
        "user_id,entity_uri,is_item,sentiment\nu1,m1,true,1\nu1,m1,true,-1\n"
    )
    with pytest.raises(RatingError, match="duplicate"):
        load_ratings(path, tiny_graph)


def test_unknown_uri_rejected(tmp_path, tiny_graph):
    path = tmp_path / "bad.csv"
    path.write_text("user_id,entity_uri,is_item,sentiment\nu1,nope,true,1\n")
    with pytest.raises(RatingError, match="unknown entity uri"):
        load_ratings(path, tiny_graph)


def test_is_item_must_match_kind(tmp_path, tiny_graph):
    path = tmp_path / "bad.csv"
    path.write_text("user_id,entity_uri,is_item,sentiment\nu1,g1,true,1\n")
    with pytest.raises(RatingError, match="is_item"):
        load_ratings(path, tiny_graph)


def test_to_binary_filters_unknowns(tiny_store):
    binary = to_binary(tiny_store)
    assert binary.variant == MR_BIN
    assert binary.n_ratings == 4
    assert (binary.sentiments != 0).all()
    # row-wise subset and size arithmetic
    assert tiny_store.n_ratings == binary.n_ratings + int((tiny_store.sentiments == 0).sum())


def test_all_unknown_user_absent_from_binary(tmp_path, tiny_graph):
    path = tmp_path / "r.csv"
    path.write_text(
        "user_id,entity_uri,is_item,sentiment\n"
        "u1,m1,true,0\nu1,m2,true,0\nu2,m1,true,1\n"
    )
    store = load_ratings(path, tiny_graph)
    binary = to_binary(store)
    assert store.n_users == 2
    assert binary.n_users == 1
    assert binary.present_users.tolist() == [1]


def test_liked_disliked_views(tiny_store):
    binary = to_binary(tiny_store)
    u1 = tiny_store.user_keys.index("u1")
    u2 = tiny_store.user_keys.index("u2")
    g = tiny_store.graph
    assert set(binary.liked(u1).tolist()) == {g.id_of("m1"), g.id_of("g1")}
    assert set(binary.disliked(u2).tolist()) == {g.id_of("m1")}


def test_filter_keeps_user_ids_stable(tiny_store):
    mask = np.ones(len(tiny_store), dtype=bool)
    mask[tiny_store.user_slice(0)] = False
    view = tiny_store.filter(mask)
    assert view.present_users.tolist() == [1]
    assert view.user_keys == tiny_store.user_keys
