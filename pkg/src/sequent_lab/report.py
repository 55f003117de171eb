import json
from fractions import Fraction
from typing import Any, Dict

import yaml
from pydantic import BaseModel, Field

from sequent_lab.config import settings
from sequent_lab.lab_logger import LabLogger


def plain(value: Any) -> Any:
    """Turn report payloads (formulas, fractions, sets, pydantic models) into JSON-compatible values"""
    if isinstance(value, BaseModel):
        return plain(value.dict())
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((plain(v) for v in value), key=str)
    if isinstance(value, Fraction):
        return str(value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


class LabReport(BaseModel):
    """
    Single report document produced by every command of the lab. The `verdict` is the headline
    (`ok`, `violations`, `member`, `not-found-within-budget`, `UNSOUND-INSTANCE`...), `data` holds
    the command specific payload and `logs` the progress lines collected during the run. The
    rendered document carries no clock time, the same inputs give the same bytes.

    ```python
    from sequent_lab import LabReport, parse_formula, search_cutfree, SearchBudget
    from sequent_lab.sequent_kernel import Sequent

    report = LabReport(command="search")
    found = search_cutfree(Sequent.of([], parse_formula("p -> p")), SearchBudget(max_depth=3))
    report.verdict = "found"
    report.data["derivation"] = str(found)
    print(report.to_text())
    ```
    """

    command: str
    verdict: str = "ok"
    data: Dict[str, Any] = Field(default_factory=dict)
    logs: LabLogger = Field(default_factory=LabLogger)
    schema_version: str = settings.REPORT_SCHEMA

    class Config:
        arbitrary_types_allowed = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": self.schema_version,
            "command": self.command,
            "verdict": self.verdict,
            "data": plain(self.data),
            "logs": list(self.logs.logs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, indent=2, allow_unicode=True)

    def render(self, format: str = "text") -> str:
        return self.to_json() if format == "json" else self.to_text()
