from app.services.certifier import certifier_service, rank_mod_p
from app.services.coeff_engine import CASES, engine_for, get_case

__all__ = ["certifier_service", "rank_mod_p", "CASES", "engine_for", "get_case"]
