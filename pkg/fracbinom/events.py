from .objects import BaseObject, McStudyReport, ReplicateRecord
from dataclasses import dataclass


class Event(BaseObject):
    """
    The class is a base event for study runs.
    """


@dataclass
class ReplicateFinishedEvent(Event):
    """
    Event on replicate finished. Dispatched in replicate order.
    """
    record: ReplicateRecord
    completed: int
    total: int


@dataclass
class StudyFinishedEvent(Event):
    """
    Event on study finished, after aggregation.
    """
    report: McStudyReport
