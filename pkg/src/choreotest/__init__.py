"""Model-based test generation from global choreographies."""

from ._core import BACKEND
from .compliance import ComplianceVerdict, SuiteReport, check_suite, compliant, suitable
from .machines import (Cfsm, Configuration, System, Transition, bisimilar, enabled, explore,
                       is_deadlock, is_stable, isomorphic, maximal_runs, step, system_language)
from .projection import check_well_formed, determinize, project, project_raw, project_system
from .semantics import Action, Pomset, in_language, language, linearizations, parse_action, sem
from .syntax import (Choice, Empty, Fork, GChor, Interaction, Repeat, Seq, parse, participants,
                     pretty, subtrees, unfold)
from .testgen import (TestCase, TestSuite, compute_oracle, gen_tests, make_test, nds, split,
                      split_raw, validate_test_case)

__version__ = "0.1.0"
