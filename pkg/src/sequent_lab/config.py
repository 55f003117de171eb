from typing import List

from pydantic import BaseSettings


# Settings of the lab, override with environment variables or a .env file
class Settings(BaseSettings):
    MAX_CLOSURE_CARRIER: int = 16
    SEARCH_DEPTH: int = 12
    SEARCH_NODES: int = 20000
    SEARCH_TERMS: List[str] = []
    TERM_DEPTH: int = 1
    PR_SYMBOLS: List[str] = []
    STRICT_BUILD: bool = False
    REPORT_SCHEMA: str = "sequent-lab/1"

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"


settings = Settings()
