import os
from dotenv import load_dotenv

load_dotenv()

class Settings:
    # Graph truncation and enumeration
    DEFAULT_DEPTH = int(os.getenv("DEFAULT_DEPTH", "4"))
    DEFAULT_MAX_LEN = int(os.getenv("DEFAULT_MAX_LEN", "3"))
    MAX_GROUPOID_ELEMENTS = int(os.getenv("MAX_GROUPOID_ELEMENTS", "1000000"))
    ISOMORPHISM_VERTEX_LIMIT = int(os.getenv("ISOMORPHISM_VERTEX_LIMIT", "10"))

    # Numerical tolerances
    IDENTITY_TOL = float(os.getenv("IDENTITY_TOL", "1e-10"))
    ROUNDTRIP_TOL = float(os.getenv("ROUNDTRIP_TOL", "1e-8"))

    # Cayley suite
    DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))
    DEFAULT_CAYLEY_DIM = int(os.getenv("DEFAULT_CAYLEY_DIM", "8"))
    CAYLEY_INSTANCES = int(os.getenv("CAYLEY_INSTANCES", "20"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING").upper()

    # Environment
    ENVIRONMENT = os.getenv("ENVIRONMENT", "development")
    DEBUG = os.getenv("DEBUG", "false").lower() == "true"

settings = Settings()
