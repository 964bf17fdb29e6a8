"""Kernel-driven generation tests."""

import pytest

import skg
from skg import (
    GenConfig,
    GenerationError,
    generate,
    get,
    nonsk_expansions,
    nonsk_weight,
    parse_value,
    render,
)


def P(text):
    return parse_value(text)


def surfaces(result):
    return sorted(set(result.surfaces))


def test_np_goal(grammar, np_goal):
    result = generate(grammar, np_goal)
    assert surfaces(result) == ["the complex sentence"]
    assert not result.exhausted_budget


def test_sentence_goal_three_strings_four_derivations(grammar, sentence_goal):
    result = generate(grammar, sentence_goal)
    assert surfaces(result) == [
        "quickly the little prolog program generated the complex sentence",
        "the little prolog program generated the complex sentence quickly",
        "the little prolog program quickly generated the complex sentence",
    ]
    # the pre-verbal adverb has two structures (attach before or after
    # the object is picked up), so there are four derivations in total
    assert len(result.outputs) == 4


def test_kernel_goal_direct(grammar):
    result = generate(grammar, P("[cat: n2, sem: [rel: sentence]]"))
    assert surfaces(result) == ["sentence"]


def test_kernel_sentence_goal(grammar):
    goal = P("""[cat: s, sem: [pred: generate, mod: <>,
                 arg1: [rel: program, def: +, mod: <>],
                 arg2: [rel: sentence, def: +, mod: <>]]]""")
    result = generate(grammar, goal)
    assert surfaces(result) == ["the program generated the sentence"]


def test_unrealizable_goal_produces_nothing(grammar):
    result = generate(grammar, P("[cat: np, sem: [rel: unicorn, def: +]]"))
    assert result.outputs == []
    assert not result.exhausted_budget


def test_root_description_resolved(grammar, np_goal):
    result = generate(grammar, np_goal)
    (tokens, deriv, root), = result.outputs
    assert tokens == ("the", "complex", "sentence")
    assert get(root, ("sem", "mod")) == P("<complex>")
    assert get(root, ("sem", "def")) == P("+")


def test_budget_exhaustion_reported(grammar, sentence_goal):
    result = generate(grammar, sentence_goal, GenConfig(step_budget=20))
    assert result.exhausted_budget
    assert result.steps_used >= 20


def test_max_results(grammar, sentence_goal):
    result = generate(grammar, sentence_goal, GenConfig(max_results=1))
    assert len(result.outputs) == 1


def test_deterministic(grammar, sentence_goal):
    a = generate(grammar, sentence_goal)
    b = generate(grammar, sentence_goal)
    assert [o[0] for o in a.outputs] == [o[0] for o in b.outputs]
    assert a.steps_used == b.steps_used


def test_trace_names_rules_and_entries(grammar, np_goal):
    result = generate(grammar, np_goal, GenConfig(trace=True))
    log = "\n".join(result.trace_log)
    for needle in ("8", "6", "7", "the", "complex", "sentence"):
        assert needle in log


def test_nonsk_weight(grammar, np_goal, sentence_goal):
    assert nonsk_weight(P("[rel: sentence]"), grammar) == 0
    assert nonsk_weight(get(np_goal, ("sem",)), grammar) == 1
    assert nonsk_weight(get(sentence_goal, ("sem",)), grammar) == 4


def test_nonsk_expansions_np(grammar, np_goal):
    expansions = nonsk_expansions(grammar, np_goal)
    assert [rule.id for rule, _ in expansions] == ["8"]
    rule, subgoals = expansions[0]
    rendered = [render(s) for s in subgoals]
    # the modifier becomes an adj subgoal; the head loses one list item
    assert any("complex" in r for r in rendered)
    head = subgoals[rule.head_index]
    assert get(head, ("sem", "mod")) == P("<>")
    assert nonsk_weight(get(head, ("sem",)), grammar) == 0


def test_nonsk_expansions_sentence(grammar, sentence_goal):
    expansions = nonsk_expansions(grammar, sentence_goal)
    ids = sorted(rule.id for rule, _ in expansions)
    assert ids == ["1a", "1b", "3"]
    for rule, subgoals in expansions:
        head = subgoals[rule.head_index]
        assert nonsk_weight(get(head, ("sem",)), grammar) == 3


def test_nonsk_expansions_requires_nonsk_goal(grammar):
    with pytest.raises(GenerationError):
        nonsk_expansions(grammar, P("[cat: n2, sem: [rel: sentence]]"))


def test_generation_error_on_missing_cat(grammar):
    with pytest.raises((GenerationError, skg.GrammarError)):
        generate(grammar, P("[sem: [rel: sentence]]"))
