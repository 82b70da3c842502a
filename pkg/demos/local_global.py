"""
Local-global checks over F_p
============================

For a link with linking matrix Lambda, a class phi in F_p^n restricts to
each component as (phi_i, (Lambda phi)_i).  Test injectivity, surjectivity
and reciprocity on random linking matrices, with the unlink as control.
"""

import numpy as np

from chebolab import localglobal as lg

hopf = lg.LinkingMatrix([[0, 1], [1, 0]])
print("Hopf link, restriction to component 0:\n", lg.restriction_map(hopf, 2, [0]))
print("surjective onto component 0:", lg.surjectivity_check(hopf, 2, [0]))

unlink = lg.LinkingMatrix(np.zeros((2, 2), dtype=int))
print("unlink, surjective onto component 0:", lg.surjectivity_check(unlink, 2, [0]))

L = lg.synthetic_linking_model(40, 10, seed=7)
print("kernel with 3 components removed:", lg.injectivity_check(L, 3, excluded=[0, 1, 2]))
print("reciprocity:", lg.reciprocity_check(L, 3, trials=100, seed=0))
print("unramified line is its own complement:", lg.unramified_orthogonality(5).ok)

exp = lg.local_global_experiment(n=50, bound=10, p=3, s_size=3, trials=200, seed=0)
ctl = lg.local_global_experiment(n=50, p=3, trials=50, seed=0, control=True)
print(f"random links: surjective {exp.surjective_rate:.3f}, injective {exp.injective_rate:.3f}")
print(f"unlink control: surjective {ctl.surjective_rate:.3f}")

# linking numbers mod n are close to uniform for the synthetic model
print("residues mod 5:", lg.linking_mod_distribution(L.entries[np.triu_indices(40, 1)], 5).round(3))
