"""Example ODEs and expressions shared by the test modules."""

import json
from importlib import resources

from sfint.symcore import Ode2, parse_expr

# z' for the worked example whose S1 is found at degree 1
WORKED_PHI = ("(x^5*z - x^4*z^2 - 3*z*x^4 + 4*x^3*z^2 - x*y + x*z + y*z - z^2 - y)"
              "/(x^5 - y)")
WORKED_I = "exp(-x)*(z*x^4 - y)/(z - x)"
WORKED_S1 = "(z - x)/(x^5 - y)"

# z' whose S2 is simple while S1 needs a degree-9 ansatz
EXP2_PHI = "-(x^2*z^8 + y*z^4*x - z*x + y)/(x*z^2*(3*y*z^4*x - 4*z*x + 3*y^2))"
EXP2_S2 = "y/(x*z^2*(3*x*y*z^4 - 4*x*z + 3*y^2))"
EXP2_H1 = "z^3*y - ln(z^4*x + y)"
EXP2_H2 = "-(z^4*x + y)/(x*exp(z^3*y))"
EXP2_H3 = "-(x*exp(z^3*y))/(z^4*x + y)"

# z' whose S3 = 4y/x is found with the denominator x
PERF_PHI = ("-((x^5*y*z^2 + 4*x^4*y^2*z - x*z^2 + x*z - 4*y*z + 4*y)*z*x^3)"
            "/(x^8*y^2*z^2 + x^8*y^2*z + z*y*x^4 + x^4*y + 1)")


def ode(phi):
    return Ode2.from_phi(parse_expr(phi))


def worked():
    return ode(WORKED_PHI)


def exp2():
    return ode(EXP2_PHI)


def perf():
    return ode(PERF_PHI)


def corpus_entries():
    text = resources.files("sfint").joinpath("data/corpus.jsonl").read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def corpus_ode(entry):
    return Ode2(entry["M"], entry["N"])
