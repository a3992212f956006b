from datetime import datetime, timezone
from typing import Optional

from sqlmodel import SQLModel, Field


class BaseModel(SQLModel):
    id: Optional[int] = Field(default=None, primary_key=True)
    created_date: str = Field(default_factory=lambda: datetime.now(timezone.utc).strftime("%d:%m:%y"),
                              description="Creation date (UTC)")
    created_time: str = Field(default_factory=lambda: datetime.now(timezone.utc).strftime("%H:%M:%S"),
                              description="Creation time (UTC)")

    def to_dict(self) -> dict:
        return {col.name: getattr(self, col.name) for col in self.__table__.columns}

    def update_from_dict(self, data: dict) -> None:
        """Updates only the fields the record already has."""
        for key, value in data.items():
            if hasattr(self, key):
                setattr(self, key, value)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}(id={self.id}, created_date={self.created_date}, created_time={self.created_time})>"


class ScenarioRun(BaseModel, table=True):
    __tablename__ = 'scenario_runs'
    scenario_hash: str = Field(..., index=True, description="Scenario fingerprint")
    label: str = Field("", description="Configuration file or sweep label")
    command: str = Field(..., description="CLI subcommand that produced the run")
    lam: Optional[float] = Field(None, description="Coupling constant")
    status: str = Field("running", description="running, completed or failed")
    exit_code: Optional[int] = Field(None)
    output_dir: str = Field("", description="Directory holding the CSV and manifest")
    markov_error_sup: Optional[float] = Field(None)
    exponent: Optional[float] = Field(None, description="Fitted decay exponent of |chi_hat|")
    message: str = Field("", description="Error message of a failed run")
