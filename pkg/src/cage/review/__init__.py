"""Human curation loop: candidate queue, decisions, and the HTTP service."""

from cage.review.store import CandidateItem, RegenJob, ReviewDecision, ReviewStore
from cage.review.service import create_app

__all__ = [
    "CandidateItem",
    "RegenJob",
    "ReviewDecision",
    "ReviewStore",
    "create_app",
]
