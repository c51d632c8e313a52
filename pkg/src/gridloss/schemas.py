"""JSON Schemas (draft 2020-12) for the reports written by each CLI subcommand."""

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_VEC = {"type": "array", "items": _NUM}
_MATRIX = {"type": "array", "items": _VEC}
_INT_LIST = {"type": "array", "items": {"type": "integer"}}


def _obj(props: dict, optional: tuple = ()) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": [k for k in props if k not in optional],
        "additionalProperties": False,
    }


LOSS_REPORT = _obj({"stochastic": _NUM, "deterministic": _NUM, "total": _NUM})

REPORT_SCHEMAS = {
    "pseudoinverse": _obj({
        "n": {"type": "integer", "minimum": 2},
        "trace": _NUM,
        "total_effective_resistance": _NUM,
        "lplus": _MATRIX,
    }),
    "resistance": {
        "oneOf": [
            _obj({"i": {"type": "integer"}, "j": {"type": "integer"}, "resistance": _NUM}),
            _obj({"total_effective_resistance": _NUM}),
        ]
    },
    "expected-loss": LOSS_REPORT,
    "optimize": _obj(
        {
            "alpha": _VEC,
            "support": _INT_LIST,
            "gamma": _NUM,
            "objective": _NUM,
            "penalized_objective": _NUM,
        },
        optional=("penalized_objective",),
    ),
    "average-k": _obj({
        "C1": _NUM,
        "C2": _NUM,
        "rows": {
            "type": "array",
            "items": _obj({"k": {"type": "integer"}, "closed_form": _NUM, "enumerated": _NUM_OR_NULL}),
        },
    }),
    "scaling-curve": _obj({
        "ratios": {"type": "array", "items": _obj({"k": {"type": "integer"}, "ratio": _NUM})},
        "gamma": _NUM,
        "asymptote": _obj({"constant": _NUM, "per_k": _NUM}),
    }),
    "simulate": _obj({
        "mean": _NUM,
        "std_error": _NUM,
        "n_samples": {"type": "integer"},
        "seed": {"type": "integer"},
        "analytic": LOSS_REPORT,
    }),
    "perturb-edge": _obj({
        "edge": _INT_LIST,
        "beta": _NUM,
        "trace_before": _NUM,
        "trace_after": _NUM,
        "total_effective_resistance_before": _NUM,
        "total_effective_resistance_after": _NUM,
        "lplus": _MATRIX,
    }),
}
