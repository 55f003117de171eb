import datetime
from typing import List, NamedTuple, Optional


class LogEntry(NamedTuple):
    time: datetime.datetime
    prefix: str
    message: str

    @property
    def line(self) -> str:
        return f"{self.prefix} {self.message}" if self.prefix else self.message

    def stamped(self) -> str:
        return f"[{self.time.strftime('%Y-%m-%dT%H:%M:%S')}] {self.line}"


class LabLogger:
    """
    Collect the progress lines of a lab run. Entries keep their time, but `logs` (what reports
    render) lists the lines alone so that a report only depends on its inputs.
    """

    def __init__(self) -> None:
        self.entries: List[LogEntry] = []

    def __repr__(self) -> str:
        return "\n".join(e.stamped() for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def logs(self) -> List[str]:
        return [e.line for e in self.entries]

    def log(self, log_msg: str, prefix: str = "") -> None:
        self.entries.append(LogEntry(datetime.datetime.now(), prefix, log_msg))

    def warn(self, log_msg: str) -> None:
        """
        Log a warning, e.g. a search budget running out

        Parameters:
            log_msg: Message to log
        """
        self.log(log_msg, "WARN:")

    def info(self, log_msg: str) -> None:
        self.log(log_msg, "INFO:")

    def failure(self, log_msg: str) -> None:
        """Log a checked failure (violation found, certificate rejected)"""
        self.log(log_msg, "FAILURE:")

    def success(self, log_msg: str) -> None:
        self.log(log_msg, "SUCCESS:")


def get_logger(logger: Optional[LabLogger]) -> LabLogger:
    return logger if logger is not None else LabLogger()
