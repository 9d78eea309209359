"""Kernel selection: compiled extension if available, pure Python otherwise.

All other modules import kernel names from here so the whole interpreter runs
on one consistent set of term classes.
"""

try:
    from . import _kernel_c as kernel

    KERNEL_COMPILED = True
except ImportError:  # pragma: no cover - depends on how the wheel was built
    from . import _kernel as kernel

    KERNEL_COMPILED = False

Term = kernel.Term
Var = kernel.Var
Num = kernel.Num
Compound = kernel.Compound
HostValue = kernel.HostValue
Atom = kernel.Atom
ChoicePoint = kernel.ChoicePoint

EMPTY_LIST = kernel.EMPTY_LIST
TRUE = kernel.TRUE
FAIL = kernel.FAIL
CURLY_EMPTY = kernel.CURLY_EMPTY

is_atom = kernel.is_atom
is_callable = kernel.is_callable
make_list = kernel.make_list
list_parts = kernel.list_parts
is_proper_list = kernel.is_proper_list
apply_sub = kernel.apply_sub
compose_sub = kernel.compose_sub
restrict_sub = kernel.restrict_sub
term_vars = kernel.term_vars
var_set = kernel.var_set
var_names_of = kernel.var_names_of
occurs_in = kernel.occurs_in
struct_eq = kernel.struct_eq
compare_terms = kernel.compare_terms
freeze = kernel.freeze
unify = kernel.unify
unify_seqs = kernel.unify_seqs
rename_term = kernel.rename_term
select_atom = kernel.select_atom
replace_selected = kernel.replace_selected
mark_cuts = kernel.mark_cuts
body_has_cut = kernel.body_has_cut
first_arg_key = kernel.first_arg_key
resolve_step = kernel.resolve_step
