"""Hot kernel: ground term representation, substitution and unification.

Everything the resolution loop touches on every inference step lives in this
one file, written in plain Python that Cython can compile unchanged (the build
copies it to _kernel_c.py and compiles that). Import sibylog._core, not this
module, to get whichever twin is active.

Design notes that matter for correctness:

* Terms are immutable once built. Atoms are Compound terms of arity 0, so a
  single structural traversal covers every shape.
* Every Compound caches `ground` (no variables below) and `indicator`
  ("name/arity"). Substitution, renaming and unification all short-circuit on
  ground subterms, which is what keeps eager substitution affordable.
* Substitutions are plain dicts {var name: term} kept *idempotent*: bound
  terms never contain bound variables. unify() maintains this invariant while
  it runs, so the dict it returns can be applied in a single pass.
* List spines ("./2" chains) are walked iteratively everywhere so a
  1000-element list never builds a 1000-deep Python call stack.
"""

# =====================================================================
# Terms
# =====================================================================


class Term:
    """Base class for the four term shapes."""

    __slots__ = ()


class Var(Term):
    __slots__ = ("name",)
    ground = False

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"Var({self.name!r})"


class Num(Term):
    __slots__ = ("value", "is_float")
    ground = True

    def __init__(self, value, is_float=False):
        self.value = value
        self.is_float = is_float

    def __repr__(self):
        return f"Num({self.value!r}, {self.is_float})"


class Compound(Term):
    __slots__ = ("functor", "args", "ground", "indicator", "vset")

    def __init__(self, functor, args=()):
        self.functor = functor
        self.args = args
        g = True
        for a in args:
            if not a.ground:
                g = False
                break
        self.ground = g
        self.vset = None  # lazily cached frozenset of variable names
        # cons cells dominate allocation in list-heavy programs; skip the
        # f-string for them
        if functor == "." and len(args) == 2:
            self.indicator = "./2"
        else:
            self.indicator = f"{functor}/{len(args)}"

    def __repr__(self):
        if not self.args:
            return f"Atom({self.functor!r})"
        return f"Compound({self.functor!r}, {list(self.args)!r})"


class HostValue(Term):
    """Opaque wrapper around a host object that has no term encoding.

    `bridge` is the host bridge that minted the wrapper; unification against
    a {prop: Value, ...} pattern asks it for property lookup and conversion.
    Two HostValues are equal exactly when they wrap the same host identity.
    """

    __slots__ = ("value", "bridge")
    ground = True

    def __init__(self, value, bridge):
        self.value = value
        self.bridge = bridge

    def __repr__(self):
        return f"HostValue({self.value!r})"


def Atom(name):
    return Compound(name, ())


# Shared ground singletons (pure allocation savings; nothing relies on
# identity of these).
EMPTY_LIST = Compound("[]", ())
TRUE = Compound("true", ())
FAIL = Compound("fail", ())
CURLY_EMPTY = Compound("{}", ())


def is_atom(t):
    return type(t) is Compound and not t.args


def is_callable(t):
    return type(t) is Compound


# =====================================================================
# Lists
# =====================================================================


def make_list(items, tail=EMPTY_LIST):
    out = tail
    for x in reversed(items):
        out = Compound(".", (x, out))
    return out


def list_parts(t):
    """Split a cons chain into (elements, tail). Proper lists end in '[]'."""
    items = []
    while type(t) is Compound and t.indicator == "./2":
        items.append(t.args[0])
        t = t.args[1]
    return items, t


def is_proper_list(t):
    while type(t) is Compound and t.indicator == "./2":
        t = t.args[1]
    return type(t) is Compound and t.indicator == "[]/0"


# =====================================================================
# Substitution application
# =====================================================================


def apply_sub(t, s):
    """Apply substitution dict s to t. Reuses untouched subterms."""
    if not s or t.ground:
        return t
    tt = type(t)
    if tt is Var:
        return s.get(t.name, t)
    if tt is not Compound:
        return t
    vs = t.vset
    if vs is not None and vs.isdisjoint(s):
        return t
    if t.indicator == "./2":
        # Iterative on the list spine; bail out at the first ground suffix.
        spine = []
        cur = t
        while type(cur) is Compound and cur.indicator == "./2" and not cur.ground:
            spine.append(cur)
            cur = cur.args[1]
        out = apply_sub(cur, s)
        changed = out is not cur
        for node in reversed(spine):
            h = node.args[0]
            h2 = apply_sub(h, s)
            if changed or h2 is not h:
                out = Compound(".", (h2, out))
                changed = True
            else:
                out = node
        return out
    args = t.args
    new_args = None
    for i, a in enumerate(args):
        a2 = apply_sub(a, s)
        if a2 is not a and new_args is None:
            new_args = list(args[:i])
        if new_args is not None:
            new_args.append(a2)
    if new_args is None:
        return t
    return Compound(t.functor, tuple(new_args))


def compose_sub(s, mgu, keep=None):
    """Compose substitution s with mgu, optionally restricted to `keep`.

    Assumes dom(s) and dom(mgu) are disjoint and both are idempotent, which
    holds along a derivation: goals are eagerly substituted, so variables
    bound earlier never reappear in a later unification problem.
    """
    out = {}
    if mgu:
        for v, t in s.items():
            if keep is None or v in keep:
                out[v] = apply_sub(t, mgu)
        for v, t in mgu.items():
            if keep is None or v in keep:
                out[v] = t
    else:
        for v, t in s.items():
            if keep is None or v in keep:
                out[v] = t
    return out


def restrict_sub(s, names):
    return {v: t for v, t in s.items() if v in names}


# =====================================================================
# Variable collection / occurs check
# =====================================================================


def term_vars(t, acc=None, seen=None):
    """Variables of t in first-appearance order (left to right)."""
    if acc is None:
        acc = []
        seen = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if x.ground:
            continue
        tx = type(x)
        if tx is Var:
            if x.name not in seen:
                seen.add(x.name)
                acc.append(x.name)
        elif tx is Compound:
            stack.extend(reversed(x.args))
    return acc


def var_set(t):
    return set(term_vars(t))


_NO_VARS = frozenset()


def var_names_of(t):
    """Variable names of t as a frozenset, cached on compound nodes.

    Terms are immutable, so the set is fixed at construction; sharing of
    unchanged subterms across substitution steps makes goal-level variable
    collection amortized O(changed path) instead of O(goal size).
    """
    if t.ground:
        return _NO_VARS
    tt = type(t)
    if tt is Var:
        return frozenset((t.name,))
    if tt is not Compound:
        return _NO_VARS
    vs = t.vset
    if vs is not None:
        return vs
    if t.indicator == "./2":
        spine = []
        cur = t
        while (
            type(cur) is Compound
            and cur.indicator == "./2"
            and not cur.ground
            and cur.vset is None
        ):
            spine.append(cur)
            cur = cur.args[1]
        acc = var_names_of(cur)
        for node in reversed(spine):
            hv = var_names_of(node.args[0])
            if hv:
                acc = acc | hv
            node.vset = acc
        return acc
    acc = _NO_VARS
    for a in t.args:
        av = var_names_of(a)
        if av:
            acc = acc | av if acc else av
    t.vset = acc
    return acc


def occurs_in(name, t):
    stack = [t]
    while stack:
        x = stack.pop()
        if x.ground:
            continue
        tx = type(x)
        if tx is Var:
            if x.name == name:
                return True
        elif tx is Compound:
            stack.extend(x.args)
    return False


# =====================================================================
# Structural equality and the standard order
# =====================================================================


def struct_eq(a, b):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        tx = type(x)
        if tx is not type(y):
            return False
        if tx is Var:
            if x.name != y.name:
                return False
        elif tx is Num:
            if x.value != y.value or x.is_float != y.is_float:
                return False
        elif tx is HostValue:
            if x.value is not y.value:
                return False
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
    return True


def _order_rank(t):
    tt = type(t)
    if tt is Var:
        return 0
    if tt is Num:
        return 1
    if tt is HostValue:
        return 2
    return 3 if not t.args else 4


def compare_terms(a, b):
    """Standard order of terms: Var < Num < HostValue < Atom < Compound.

    Numbers compare by value with a float preceding an equal integer;
    compounds by arity, then functor, then arguments left to right.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        rx, ry = _order_rank(x), _order_rank(y)
        if rx != ry:
            return -1 if rx < ry else 1
        if rx == 0:
            if x.name != y.name:
                return -1 if x.name < y.name else 1
        elif rx == 1:
            if x.value != y.value:
                return -1 if x.value < y.value else 1
            if x.is_float != y.is_float:
                return -1 if x.is_float else 1
        elif rx == 2:
            if x.value is not y.value:
                ix, iy = id(x.value), id(y.value)
                return -1 if ix < iy else 1
        elif rx == 3:
            if x.functor != y.functor:
                return -1 if x.functor < y.functor else 1
        else:
            if len(x.args) != len(y.args):
                return -1 if len(x.args) < len(y.args) else 1
            if x.functor != y.functor:
                return -1 if x.functor < y.functor else 1
            stack.extend(reversed(list(zip(x.args, y.args))))
    return 0


def freeze(t):
    """Hashable structural key (used for grouping and deduplication)."""
    tt = type(t)
    if tt is Var:
        return ("v", t.name)
    if tt is Num:
        return ("n", t.value, t.is_float)
    if tt is HostValue:
        return ("h", id(t.value))
    return ("c", t.functor, tuple(freeze(a) for a in t.args))


# =====================================================================
# Unification
# =====================================================================


def _bind(s, name, t, occurs_check):
    """Add name -> t to s keeping s idempotent. Returns False on occurs."""
    if s:
        t = apply_sub(t, s)
    if type(t) is Var and t.name == name:
        return True
    if occurs_check and occurs_in(name, t):
        return False
    if s:
        one = {name: t}
        for k, v in s.items():
            s[k] = apply_sub(v, one)
    s[name] = t
    return True


def _host_pattern_pairs(h, pattern):
    """Decompose a {p1: v1, ..., pn: vn} pattern against host value h.

    Returns a list of (converted property value, pattern value) pairs, or
    None if the pattern is malformed or a property is missing. Validation of
    the whole pattern happens before any pair is unified.
    """
    props = []
    ptr = pattern.args[0]
    while type(ptr) is Compound and ptr.indicator == ",/2":
        props.append(ptr.args[0])
        ptr = ptr.args[1]
    props.append(ptr)
    pairs = []
    bridge = h.bridge
    for p in props:
        if type(p) is not Compound or p.indicator != ":/2":
            return None
        name = p.args[0]
        if not is_atom(name) or not bridge.has_property(h.value, name.functor):
            return None
        converted = bridge.to_term(bridge.get_property(h.value, name.functor))
        pairs.append((converted, p.args[1]))
    return pairs


def unify(a, b, occurs_check=False):
    """Most general unifier of a and b as an idempotent dict, or None.

    Argument pairs are solved left to right; failure is a value (None), never
    an exception.
    """
    s = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        while type(x) is Var:
            nx = s.get(x.name)
            if nx is None:
                break
            x = nx
        while type(y) is Var:
            ny = s.get(y.name)
            if ny is None:
                break
            y = ny
        if x is y:
            continue
        tx = type(x)
        ty = type(y)
        if tx is Var:
            if ty is Var:
                if y.name == x.name:
                    continue
                # Prefer binding the machine-minted variable so answers
                # come out in terms of the query's own names.
                if y.name.startswith("_G") and not x.name.startswith("_G"):
                    x, y = y, x
            if not _bind(s, x.name, y, occurs_check):
                return None
        elif ty is Var:
            if not _bind(s, y.name, x, occurs_check):
                return None
        elif tx is Num:
            if ty is Num and x.value == y.value and x.is_float == y.is_float:
                continue
            return None
        elif tx is HostValue or ty is HostValue:
            if tx is HostValue and ty is HostValue:
                if x.value is y.value:
                    continue
                return None
            h, t = (x, y) if tx is HostValue else (y, x)
            if type(t) is Compound and t.indicator == "{}/1":
                pairs = _host_pattern_pairs(h, t)
                if pairs is None:
                    return None
                stack.extend(reversed(pairs))
            else:
                return None
        else:
            if ty is not Compound:
                return None
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            if x.ground and y.ground:
                if struct_eq(x, y):
                    continue
                return None
            # Pairs go on in reverse so arguments are solved left to right;
            # list spines iterate through the stack, never the call stack.
            stack.extend(reversed(list(zip(x.args, y.args))))
    return s


def unify_seqs(xs, ys, occurs_check=False):
    """Pairwise unification of two equal-length term sequences, left to right."""
    if len(xs) != len(ys):
        return None
    s = {}
    for x, y in zip(xs, ys):
        mgu = unify(apply_sub(x, s), apply_sub(y, s), occurs_check)
        if mgu is None:
            return None
        for k, v in s.items():
            s[k] = apply_sub(v, mgu)
        s.update(mgu)
    return s


# =====================================================================
# Renaming (fresh variables)
# =====================================================================


def rename_term(t, mapping, counter):
    """Copy t replacing every variable via mapping, minting fresh `_G<n>`
    names from counter (a one-element list used as a mutable cell)."""
    if t.ground:
        return t
    tt = type(t)
    if tt is Var:
        v = mapping.get(t.name)
        if v is None:
            counter[0] += 1
            v = Var(f"_G{counter[0]}")
            mapping[t.name] = v
        return v
    if t.indicator == "./2":
        spine = []
        cur = t
        while type(cur) is Compound and cur.indicator == "./2" and not cur.ground:
            spine.append(cur.args[0])
            cur = cur.args[1]
        out = rename_term(cur, mapping, counter)
        for h in reversed(spine):
            out = Compound(".", (rename_term(h, mapping, counter), out))
        return out
    return Compound(t.functor, tuple(rename_term(a, mapping, counter) for a in t.args))


# =====================================================================
# Goals (conjunction terms) and cut marking
# =====================================================================


def select_atom(goal):
    """Leftmost atom of a conjunction goal."""
    while type(goal) is Compound and goal.indicator == ",/2":
        goal = goal.args[0]
    return goal


def replace_selected(goal, body):
    """Replace the leftmost atom of goal with body (None removes it)."""
    if type(goal) is Compound and goal.indicator == ",/2":
        left = replace_selected(goal.args[0], body)
        if left is None:
            return goal.args[1]
        return Compound(",", (left, goal.args[1]))
    return body


def mark_cuts(t, barrier, barrier_depth):
    """Replace `!` atoms in the transparent control skeleton of a body with
    `$cut(barrier, depth)`. Cut is transparent to ,/2 and ;/2 and to the
    `then` branch of ->/2; everywhere else (call arguments, the if-then
    condition) it stays bare and acquires a local barrier when that
    construct runs."""
    if type(t) is not Compound:
        return t
    ind = t.indicator
    if ind == "!/0":
        return Compound("$cut", (Num(barrier), Num(barrier_depth)))
    if ind == ",/2" or ind == ";/2":
        a = mark_cuts(t.args[0], barrier, barrier_depth)
        b = mark_cuts(t.args[1], barrier, barrier_depth)
        if a is t.args[0] and b is t.args[1]:
            return t
        return Compound(t.functor, (a, b))
    if ind == "->/2":
        b = mark_cuts(t.args[1], barrier, barrier_depth)
        if b is t.args[1]:
            return t
        return Compound("->", (t.args[0], b))
    return t


def body_has_cut(t):
    """True when the transparent skeleton of a clause body reaches a `!`."""
    if type(t) is not Compound:
        return False
    ind = t.indicator
    if ind == "!/0":
        return True
    if ind == ",/2" or ind == ";/2":
        return body_has_cut(t.args[0]) or body_has_cut(t.args[1])
    if ind == "->/2":
        return body_has_cut(t.args[1])
    return False


# =====================================================================
# Choice points
# =====================================================================


class ChoicePoint:
    """One stack entry of the resolution: goal, substitution, parent link.

    goal None marks an answer; `ball` non-None marks an error state carrying
    an ISO error term. `pid` is a thread-unique creation id used both as a
    cut barrier and as a stable node id for derivation-tree export; `depth`
    lets cut's ancestor walk stop early. `payload` carries opaque state for
    internal frame points (catch re-entry, retract alternatives).
    """

    __slots__ = ("goal", "sub", "parent", "pid", "depth", "ball", "payload")

    def __init__(self, goal, sub, parent, pid, depth=0, ball=None, payload=None):
        self.goal = goal
        self.sub = sub
        self.parent = parent
        self.pid = pid
        self.depth = depth
        self.ball = ball
        self.payload = payload


def first_arg_key(t):
    """Indexing key of a call's first argument: None means 'any bucket'."""
    tt = type(t)
    if tt is Var:
        return None
    if tt is Num:
        return ("n", t.value, t.is_float)
    if tt is HostValue:
        return None
    if not t.args:
        return ("a", t.functor)
    return ("c", t.functor, len(t.args))


def resolve_step(atom, goal, sub, clauses, occurs_check, barrier, barrier_depth,
                 counter, base_keep):
    """Expand one selected atom against candidate clauses.

    Returns a list of (new_goal, new_sub) pairs in textual clause order.
    Each clause is renamed fresh, unified with the atom, its body gets cut
    markers for `barrier`, and the composed substitution is pruned down to
    base_keep (query + protected variables) plus variables still visible in
    the new goal; anything else can never be referenced again.
    """
    out = []
    rest = replace_selected(goal, None)
    for clause in clauses:
        mapping = {}
        head = rename_term(clause.head, mapping, counter)
        mgu = unify(atom, head, occurs_check)
        if mgu is None:
            continue
        body = clause.body
        if body is not None:
            body = rename_term(body, mapping, counter)
            if clause.has_cut:
                body = mark_cuts(body, barrier, barrier_depth)
            new_goal = Compound(",", (body, rest)) if rest is not None else body
        else:
            new_goal = rest
        if new_goal is not None:
            new_goal = apply_sub(new_goal, mgu)
            keep = set(base_keep)
            keep.update(var_names_of(new_goal))
        else:
            keep = base_keep
        out.append((new_goal, compose_sub(sub, mgu, keep)))
    return out
