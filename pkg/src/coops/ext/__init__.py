"""Ext over E(n)_*: Koszul engine, cobar oracle, v_0-localization and generator tables."""
from .chart import chart_json, chart_svg, chart_tsv
from .cobar import cobar_ext_oracle, connecting_map_check, diff_charts, exterior_on
from .koszul import ExtChart, KoszulComplex, build_koszul, ext_dims, is_zero_in_ext, torsion_report, v_multiplication
from .localized import (
    AdamsCoverDescriptor, LocalizedComplex, LocalizedExt, adams_cover_check, expected_bp2_generators, v0_inverted_ext,
)
from .tables import (
    compare_with_golden, format_table, inductive_table, length_relations, load_golden, extension_partners,
    verify_length_relation, verify_table_directly,
)

__all__ = [
    "ExtChart", "KoszulComplex", "build_koszul", "ext_dims", "is_zero_in_ext", "torsion_report", "v_multiplication",
    "cobar_ext_oracle", "connecting_map_check", "diff_charts", "exterior_on",
    "AdamsCoverDescriptor", "LocalizedComplex", "LocalizedExt", "adams_cover_check", "expected_bp2_generators",
    "v0_inverted_ext", "compare_with_golden", "format_table", "inductive_table", "length_relations", "load_golden",
    "extension_partners", "verify_length_relation", "verify_table_directly", "chart_json", "chart_svg", "chart_tsv",
]
