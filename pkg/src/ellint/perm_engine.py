"""Word bookkeeping for the symmetric and braid groups behind the R-operator.

A word is a tuple of generator indices (1..5), read left to right as an operator
product, so the rightmost letter acts first.  The parameter tuple is
(u1, u2, v1, v2[, w1, w2]); s_i swaps its entries i and i+1, and S_i(u)
carries the difference of those two entries.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import ArityError, SearchExhausted

U4 = ("u1", "u2", "v1", "v2")
U6 = ("u1", "u2", "v1", "v2", "w1", "w2")
MAX_DEPTH = 20


def _check(word, n):
    for i in word:
        if not 1 <= i < n:
            raise ArityError(f"generator s{i} needs a tuple of length > {i}, got {n}")


def act(word, u):
    """The image of the tuple u under the permutation word (rightmost letter first)."""
    u = list(u)
    _check(word, len(u))
    for i in reversed(word):
        u[i - 1], u[i] = u[i], u[i - 1]
    return tuple(u)


def permutation(word, n):
    """The permutation of range(n) as a tuple: positions after acting on (0, 1, ..., n-1)."""
    return act(word, range(n))


def expand_annotated(word, u):
    """[(i, (a, b)), ...] meaning S_i(a - b), with S_j S_k := S_j(s_k u) S_k(u)."""
    _check(word, len(u))
    out = []
    for n, i in enumerate(word):
        v = act(word[n + 1:], u)
        out.append((i, (v[i - 1], v[i])))
    return out


def format_annotated(expansion):
    return " ".join(f"S{i}({a}-{b})" for i, (a, b) in expansion)


def numeric_word(expansion, values):
    """Operator list [('S_i', a - b)] with the symbols replaced by values[symbol]."""
    return [(f"S{i}", values[a] - values[b]) for i, (a, b) in expansion]


def r_block(u, v, pair="12"):
    """The annotated R-operator R_pair(u1,u2|v1,v2) = S_m(u1-v2) S_l(u1-v1) S_r(u2-v2) S_m(u2-v1)."""
    m, left, right = {"12": (2, 1, 3), "23": (4, 3, 5)}[pair]
    (u1, u2), (v1, v2) = u, v
    return [(m, (u1, v2)), (left, (u1, v1)), (right, (u2, v2)), (m, (u2, v1))]


# ---------------------------------------------------------------- rewriting

def _moves(word):
    """All words one braid move away, with a description of the move."""
    n = len(word)
    for k in range(n - 1):
        a, b = word[k], word[k + 1]
        if abs(a - b) > 1:
            yield word[:k] + (b, a) + word[k + 2:], ("commute", k)
    for k in range(n - 2):
        a, b, c = word[k:k + 3]
        if a == c and abs(a - b) == 1:
            yield word[:k] + (b, a, b) + word[k + 3:], ("braid", k)


@dataclass
class WordCheck:
    equal: bool
    same_permutation: bool
    trace: list = field(default_factory=list)
    depth: int = 0

    def __bool__(self):
        return self.equal


def verify_word_identity(lhs, rhs, max_depth=MAX_DEPTH, n=6):
    """Certify lhs = rhs in the braid monoid by breadth-first rewriting.

    Only far commutations and cubic braid moves are used.  Words with
    different permutations are rejected at once; SearchExhausted is raised if
    equal permutations are not connected within max_depth moves.
    """
    lhs, rhs = tuple(lhs), tuple(rhs)
    _check(lhs, n)
    _check(rhs, n)
    same = len(lhs) == len(rhs) and permutation(lhs, n) == permutation(rhs, n)
    if not same:
        return WordCheck(False, permutation(lhs, n) == permutation(rhs, n))
    parent = {lhs: None}
    frontier = deque([(lhs, 0)])
    while frontier:
        w, d = frontier.popleft()
        if w == rhs:
            trace = []
            while parent[w] is not None:
                prev, move = parent[w]
                trace.append((move[0], move[1], w))
                w = prev
            trace.reverse()
            return WordCheck(True, True, [("start", None, lhs)] + trace, d)
        if d == max_depth:
            continue
        for nxt, move in _moves(w):
            if nxt not in parent:
                parent[nxt] = (w, move)
                frontier.append((nxt, d + 1))
    raise SearchExhausted(f"no rewriting of length <= {max_depth} found")


def format_trace(check):
    lines = []
    for move, pos, w in check.trace:
        word = "".join(f"s{i}" for i in w)
        lines.append(word if move == "start" else f"{move}@{pos}: {word}")
    return lines


def parse_word(text):
    """'s2s1s3s2' or '2 1 3 2' -> (2, 1, 3, 2)."""
    text = text.replace("s", " ").replace("S", " ").replace(",", " ").replace("·", " ")
    return tuple(int(x) for x in text.split())


# ---------------------------------------------------------------- stored identities

R12_WORD = (2, 1, 3, 2)
R23_WORD = (4, 3, 5, 4)

# the chain of 12-letter identities taking one side of the Yang-Baxter relation to the other
PROOF_CHAIN = (
    (parse_word("s2s3s1s2 s4s3s5s4 s2s1s3s2"), parse_word("s2s3s4s1 s3s2s3 s1s5s4s3s2")),
    (parse_word("s2s3s4s3 s2s1s2 s5s3s4s3s2"), parse_word("s4s2s3s2 s4s1s5s4 s2s3s2s4")),
    (parse_word("s4s3s2s3 s1s5s4s5 s3s2s3s4"), parse_word("s4s3s5s4 s2s1s3s2 s4s3s5s4")),
)


def _commutation_class(expansion):
    """All reorderings of an annotated word by swapping adjacent far-apart generators."""
    start = tuple(expansion)
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for k in range(len(w) - 1):
            if abs(w[k][0] - w[k + 1][0]) > 1:
                nxt = w[:k] + (w[k + 1], w[k]) + w[k + 2:]
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return seen


def same_up_to_commutation(a, b):
    return tuple(b) in _commutation_class(a)


@dataclass
class GateResult:
    passed: bool
    checks: list

    def __bool__(self):
        return self.passed


def ybe_gate(max_depth=MAX_DEPTH):
    """Word-level prerequisites of the numeric Yang-Baxter test.

    1. Each stored proof step is a valid braid rewriting.
    2. The consecutive steps connect, so the first word equals the last.
    3. The two end words expand to the R-operator products used numerically:
       R12(v|w) R23(u|w) R12(u|v) and R23(u|v) R12(u|w) R23(v|w).
    """
    checks = []
    for k, (a, b) in enumerate(PROOF_CHAIN):
        checks.append((f"proof step {k + 1}", bool(verify_word_identity(a, b, max_depth))))
    for k in range(len(PROOF_CHAIN) - 1):
        a, b = PROOF_CHAIN[k][1], PROOF_CHAIN[k + 1][0]
        checks.append((f"link {k + 1}-{k + 2}", bool(verify_word_identity(a, b, max_depth))))
    u, v, w = ("u1", "u2"), ("v1", "v2"), ("w1", "w2")
    first = expand_annotated(PROOF_CHAIN[0][0], U6)
    last = expand_annotated(PROOF_CHAIN[-1][1], U6)
    rhs = r_block(v, w, "12") + r_block(u, w, "23") + r_block(u, v, "12")
    lhs = r_block(u, v, "23") + r_block(u, w, "12") + r_block(v, w, "23")
    checks.append(("first word is R12 R23 R12", same_up_to_commutation(first, rhs)))
    checks.append(("last word is R23 R12 R23", same_up_to_commutation(last, lhs)))
    return GateResult(all(ok for _, ok in checks), checks)


def rll_gate():
    """The R12 word realizes the permutation (u1,u2,v1,v2) -> (v1,v2,u1,u2) with the expected arguments."""
    checks = [
        ("s2s1s3s2 swaps the pairs", act(R12_WORD, U4) == ("v1", "v2", "u1", "u2")),
        ("R12 arguments", expand_annotated(R12_WORD, U4) == r_block(("u1", "u2"), ("v1", "v2"), "12")),
        ("R23 arguments", expand_annotated(R23_WORD, U6) == r_block(("v1", "v2"), ("w1", "w2"), "23")),
    ]
    return GateResult(all(ok for _, ok in checks), checks)


def coxeter_gate():
    """s1 s1 = 1, s1 s3 = s3 s1 and s1 s2 s1 = s2 s1 s2 at the level of words."""
    checks = [
        ("s1 s1 acts trivially", act((1, 1), U4) == U4),
        ("s1 s3 = s3 s1", bool(verify_word_identity((1, 3), (3, 1), n=4))),
        ("s1 s2 s1 = s2 s1 s2", bool(verify_word_identity((1, 2, 1), (2, 1, 2), n=4))),
    ]
    return GateResult(all(ok for _, ok in checks), checks)


GATES = {"YBE": ybe_gate, "RLL": rll_gate, "coxeter": coxeter_gate}
