from pathlib import Path

import pytest
from hypothesis import given, settings

from choreotest.corpus import ATM, ATM_FULL
from choreotest.syntax import (ChorSyntaxError, Choice, Empty, Fork, Interaction, Repeat, Seq,
                               SelfInteractionError, from_json, has_repeat, iter_nodes, normalize,
                               number, parse, participants, pretty, subtrees, to_json, unfold)

from strategies import chors

AB_M = Interaction("A", "B", "m")


def test_parse_atm():
    g = parse(ATM)
    withdraw = Interaction("C", "A", "withdraw")
    auth = Interaction("A", "B", "authW")
    deny = Seq(Interaction("B", "A", "deny"), Interaction("A", "C", "bye"))
    allow = Seq(Interaction("B", "A", "allow"), Interaction("A", "C", "money"))
    assert g == Seq(withdraw, Seq(auth, Choice(deny, allow)))


def test_parse_empty():
    assert parse("(o)") == Empty()


def test_self_interaction():
    with pytest.raises(SelfInteractionError):
        parse("A->A:m")


@pytest.mark.parametrize("text,line,col", [
    ("A->B:m + ", 1, 10),
    ("A->B:m ;\n  ( C->D:n", 2, 11),
    ("A-B:m", 1, 2),
])
def test_syntax_error_position(text, line, col):
    with pytest.raises(ChorSyntaxError) as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (line, col)


def test_precedence():
    g = parse("A->B:m ; B->C:n + C->A:x | A->C:y")
    assert isinstance(g, Fork)
    assert isinstance(g.left, Choice)
    assert isinstance(g.left.left, Seq)


def test_trailing_empty_omitted():
    assert parse("A->B:m ; (o)") == Seq(AB_M, Empty())
    assert parse("A->B:m ;") == Seq(AB_M, Empty())
    assert parse("A->B:m + (o)") == Choice(AB_M, Empty())


def test_repeat_syntax():
    assert parse("repeat { A->B:m }") == Repeat(AB_M)
    assert parse("C->A:x ; repeat { A->B:m ; B->A:n }") == Seq(
        Interaction("C", "A", "x"), Repeat(Seq(AB_M, Interaction("B", "A", "n"))))


def test_comments_and_whitespace():
    assert parse("# request\nA->B:m  # done\n") == AB_M


def test_participants():
    assert participants(parse(ATM)) == {"A", "B", "C"}
    assert participants(Empty()) == frozenset()
    assert participants(Fork(AB_M, Interaction("C", "D", "n"))) == {"A", "B", "C", "D"}


def test_unfold_examples():
    assert unfold(Repeat(AB_M), 0) == Empty()
    assert unfold(Repeat(AB_M), 2) == Choice(Empty(), Choice(AB_M, Seq(AB_M, AB_M)))
    g = parse(ATM)
    assert unfold(g, 3) == g


def test_unfold_renumbers():
    g = unfold(parse("A->B:m ; repeat { B->A:n }"), 2)
    ids = [n.node_id for n in iter_nodes(g)]
    assert ids == list(range(len(ids)))


def test_unfold_rejects_negative():
    with pytest.raises(ValueError):
        unfold(AB_M, -1)


def test_subtrees():
    assert [s.chor for s in subtrees(AB_M)] == [AB_M]
    g = parse(ATM)
    subs = subtrees(g)
    assert subs[0].chor == g
    assert any(s.chor == Interaction("B", "A", "allow") for s in subs)
    assert len(subtrees(number(Seq(AB_M, Interaction("C", "D", "n"))))) == 3


def test_subtrees_keep_duplicates():
    g = parse("A->B:m ; A->B:m")
    subs = subtrees(g)
    assert len(subs) == 3
    assert subs[1].chor == subs[2].chor and subs[1].root != subs[2].root


def test_subtrees_need_unfolding():
    with pytest.raises(ValueError):
        subtrees(parse("repeat { A->B:m }"))


def test_full_atm_subtree_count():
    # 18 interactions joined by 17 binary operators
    assert len(subtrees(parse(ATM_FULL))) == 35


def test_json_round_trip():
    g = parse(ATM_FULL)
    back = from_json(to_json(g))
    assert back == g
    assert [n.node_id for n in iter_nodes(back)] == [n.node_id for n in iter_nodes(g)]


@settings(max_examples=300, deadline=None)
@given(chors(repeat=True))
def test_pretty_parse_round_trip(g):
    assert parse(pretty(g)) == normalize(g)


@settings(max_examples=200, deadline=None)
@given(chors(repeat=True))
def test_unfold_removes_repeat(g):
    for k in range(3):
        assert not has_repeat(unfold(g, k))


@settings(max_examples=200, deadline=None)
@given(chors(repeat=True))
def test_unfold_participants(g):
    assert participants(unfold(g, 0)) <= participants(g)
    assert participants(unfold(g, 1)) == participants(g)


@settings(max_examples=200, deadline=None)
@given(chors())
def test_subtree_ids_unique(g):
    g = number(g)
    subs = subtrees(g)
    ids = [s.root for s in subs]
    assert len(set(ids)) == len(ids)
    assert subs[0].chor == g


def test_fixture_files_match_corpus():
    root = Path(__file__).parent.parent / "fixtures"
    assert parse((root / "atm.gc").read_text()) == parse(ATM)
    assert parse((root / "atm_full.gc").read_text()) == parse(ATM_FULL)
