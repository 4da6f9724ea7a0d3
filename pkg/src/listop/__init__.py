"""Random row and column operations on codes, with exact list-decoding oracles."""
from .codes import (Alphabet, CodeMatrix, LdReport, agreement, ball_intersection_size, code_min_distance,
                    hamming_ball_volume, hamming_distance, is_avg_radius_list_decodable, is_list_decodable,
                    max_agreement_sum, plurality_vector)
from .errors import (BudgetError, CodeFormatError, ConstructionError, DegenerateCodeError,
                     FormulaDomainError, InputError, ListopError)
from .repro import derive_seed

__all__ = [
    "Alphabet", "CodeMatrix", "LdReport", "agreement", "ball_intersection_size", "code_min_distance",
    "hamming_ball_volume", "hamming_distance", "is_avg_radius_list_decodable", "is_list_decodable",
    "max_agreement_sum", "plurality_vector", "BudgetError", "CodeFormatError", "ConstructionError",
    "DegenerateCodeError", "FormulaDomainError", "InputError", "ListopError", "derive_seed",
]
