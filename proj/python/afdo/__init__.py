"""Python surface of the autonomous digital-object decision stack.

Thin re-export of the compiled module: consensus aggregation, trust
dynamics, policy parsing/evaluation, corpus generation and the CLI entry
point.
"""

try:
    # Installed layout: the extension lives inside this package.
    from afdo._afdo import (
        PolicyRunner,
        bootstrap_ci,
        canonical_policy,
        classification_score,
        consensus,
        corpus_accuracy,
        derive_seed,
        generate_corpus_jsonl,
        hash_submitter,
        ks_distance,
        recovery_time,
        run_cli,
        score_classification,
        sha256_hex,
        trust_step,
        trust_trajectory,
    )
except ImportError:
    # Build-tree layout: the extension sits on PYTHONPATH as a top-level module.
    from _afdo import (
        PolicyRunner,
        bootstrap_ci,
        canonical_policy,
        classification_score,
        consensus,
        corpus_accuracy,
        derive_seed,
        generate_corpus_jsonl,
        hash_submitter,
        ks_distance,
        recovery_time,
        run_cli,
        score_classification,
        sha256_hex,
        trust_step,
        trust_trajectory,
    )

__all__ = [
    "PolicyRunner",
    "bootstrap_ci",
    "canonical_policy",
    "classification_score",
    "consensus",
    "corpus_accuracy",
    "derive_seed",
    "generate_corpus_jsonl",
    "hash_submitter",
    "ks_distance",
    "recovery_time",
    "run_cli",
    "score_classification",
    "sha256_hex",
    "trust_step",
    "trust_trajectory",
]
