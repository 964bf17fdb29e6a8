"""Left-corner parsing and parse/generate round-trip checks.

The parser works bottom-up from the leftmost word, projecting completed
constituents upward through rules whose leftmost daughter they match,
and filters projections top-down with a precomputed left-corner link
table (the reflexive-transitive closure of the mother-to-leftmost-
daughter category relation).  A step budget guards against grammars
with cyclic unary projections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .avm import (
    ABSENT,
    Atom,
    Avm,
    Env,
    Value,
    equal_modulo_renaming,
    get,
    normalize,
    subsumes,
)
from .grammar import Grammar
from .kernel import normalize_nonsk
from .search import (
    BudgetExhausted,
    GenConfig,
    ensure_recursion_room,
    Leaf,
    Node,
    StepCounter,
    signature,
    yield_tokens,
)


class ParseError(ValueError):
    """Unparseable request (unknown token, empty input)."""


@dataclass
class ParseResult:
    analyses: list  # list[(semantics, Derivation)]
    steps_used: int
    exhausted_budget: bool

    @property
    def semantics(self):
        return [sem for sem, _ in self.analyses]


def left_corner_table(grammar: Grammar) -> frozenset:
    """Closure of (mother cat, leftmost daughter cat), plus reflexivity."""
    cats = set()
    for r in grammar.rules:
        cats.add(r.mother_cat)
        for i in range(len(r.daughters)):
            cats.add(r.daughter_cat(i))
    for e in grammar.lexicon:
        cats.add(e.cat)
    pairs = {(c, c) for c in cats}
    for r in grammar.rules:
        pairs.add((r.mother_cat, r.daughter_cat(0)))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(pairs):
            for (c, d) in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return frozenset(pairs)


def tokenize_sentence(sentence: str):
    """Whitespace-split, lowercase token sequence."""
    return tuple(t.lower() for t in sentence.split())


class _ParseRun:
    def __init__(self, grammar: Grammar, tokens, cfg: GenConfig):
        self.g = grammar
        self.tokens = tokens
        self.cfg = cfg
        self.env = Env()
        self.steps = StepCounter(cfg.step_budget)
        self.env.on_step = self.steps.tick
        self.lc = left_corner_table(grammar)

    def parse_goal(self, goal: Value, pos: int):
        """Yield (end, derivation, merged value) for matching constituents."""
        if pos >= len(self.tokens):
            return
        env = self.env
        goal_cat = get(env.resolve(goal), ("cat",))
        goal_cat = goal_cat.name if isinstance(goal_cat, Atom) else None
        token = self.tokens[pos]
        for entry in self.g.entries_for(token):
            if goal_cat is not None and (goal_cat, entry.cat) not in self.lc:
                continue
            self.steps.tick()
            mark = env.mark()
            pivot = env.instantiate(entry.description, {})
            yield from self._project(pivot, Leaf(entry), pos + 1, goal, goal_cat)
            env.undo(mark)

    def _project(self, value, deriv, end, goal, goal_cat):
        env = self.env
        self.steps.tick()
        mark = env.mark()
        merged = env.unify(value, goal)
        if merged is not None:
            yield (end, deriv, merged)
        env.undo(mark)
        for rule in self.g.rules:
            if goal_cat is not None and (goal_cat, rule.mother_cat) not in self.lc:
                continue
            self.steps.tick()
            mark = env.mark()
            mapping = {}
            mother = env.instantiate(rule.mother, mapping)
            daughters = [env.instantiate(d, mapping) for d in rule.daughters]
            if env.unify(daughters[0], value) is None:
                env.undo(mark)
                continue
            for state in self._parse_rest(daughters, 1, end, [deriv]):
                rest_end, children = state
                mother_value = env.resolve(mother)
                mother_value = env.unify(mother_value, mother_value)
                if mother_value is None:
                    continue
                yield from self._project(mother_value,
                                         Node(rule.id, tuple(children)),
                                         rest_end, goal, goal_cat)
            env.undo(mark)

    def _parse_rest(self, daughters, i, pos, children):
        if i == len(daughters):
            yield (pos, list(children))
            return
        for end, deriv, _ in self.parse_goal(daughters[i], pos):
            yield from self._parse_rest(daughters, i + 1, end,
                                        children + [deriv])


def parse(grammar: Grammar, tokens, cfg: GenConfig = None,
          root_cat: str = None) -> ParseResult:
    """All complete analyses of the token sequence under the grammar."""
    cfg = cfg or GenConfig()
    if isinstance(tokens, str):
        tokens = tokenize_sentence(tokens)
    tokens = tuple(t.lower() for t in tokens)
    if not tokens:
        raise ParseError("empty input")
    for t in tokens:
        if not grammar.entries_for(t):
            raise ParseError(f"unknown token {t!r}")
    root_cat = root_cat or grammar.start
    ensure_recursion_room()
    run = _ParseRun(grammar, tokens, cfg)
    goal = Avm((("cat", Atom(root_cat)),))
    goal_inst = run.env.instantiate(goal, {})
    analyses = []
    seen = set()
    exhausted = False
    try:
        for end, deriv, merged in run.parse_goal(goal_inst, 0):
            if end != len(tokens):
                continue
            sem = get(run.env.resolve(merged), ("sem",))
            sem = normalize(sem) if sem is not ABSENT else ABSENT
            key = (sem, signature(deriv))
            if key in seen:
                continue
            seen.add(key)
            analyses.append((sem, deriv))
    except BudgetExhausted:
        exhausted = True
    return ParseResult(analyses, run.steps.used, exhausted)


# ---------------------------------------------------------------------------
# Round-trip checking.
# ---------------------------------------------------------------------------


def check_output(grammar: Grammar, tokens, root_cat: str,
                 input_sem: Value, cfg: GenConfig = None):
    """Failed round-trip checks for one generated string; [] when clean.

    Coherence: some parse of the string means no more than the input.
    Completeness: some parse means no less.  Both must hold for a single
    analysis for the output to count as clean.
    """
    if input_sem is ABSENT:
        return []
    try:
        result = parse(grammar, tokens, cfg or GenConfig(), root_cat)
    except ParseError:
        return ["no-parse"]
    if not result.analyses:
        return ["no-parse"]
    want = normalize_nonsk(input_sem, grammar)
    best = None
    for sem, _ in result.analyses:
        if sem is ABSENT:
            continue
        failures = []
        # Coherent: the analysis claims nothing beyond the input.  The
        # raw reading is used, so an absent or open modifier list makes
        # no claim.
        if not subsumes(sem, want):
            failures.append("incoherent")
        # Complete: under the minimal reading the analysis still covers
        # everything the input specified.
        if not subsumes(want, normalize_nonsk(sem, grammar)):
            failures.append("incomplete")
        if not failures:
            return []
        if best is None or len(failures) < len(best):
            best = failures
    return best if best is not None else ["no-semantics"]


@dataclass
class RoundTripReport:
    ok: bool
    reason: str
    entries: list = field(default_factory=list)
    # entries: (surface string, coherent, complete)
    generation: object = None


def roundtrip(grammar: Grammar, goal: Value, cfg: GenConfig = None) -> RoundTripReport:
    """Generate from a goal, re-parse every output, verify both directions."""
    from .generator import generate

    cfg = cfg or GenConfig()
    result = generate(grammar, goal, cfg)
    if result.exhausted_budget:
        return RoundTripReport(False, "budget-exhausted", [], result)
    if not result.outputs:
        return RoundTripReport(False, "no-output", [], result)
    cat = get(goal, ("cat",))
    root_cat = cat.name if isinstance(cat, Atom) else grammar.start
    input_sem = get(goal, ("sem",))
    entries = []
    ok = True
    checked = set()
    for tokens, _deriv, _root in result.outputs:
        if tokens in checked:
            continue
        checked.add(tokens)
        failures = check_output(grammar, tokens, root_cat, input_sem, cfg)
        coherent = "incoherent" not in failures and "no-parse" not in failures
        complete = "incomplete" not in failures and "no-parse" not in failures
        entries.append((" ".join(tokens), coherent, complete))
        ok = ok and coherent and complete
    return RoundTripReport(ok, "pass" if ok else "check-failed", entries, result)
