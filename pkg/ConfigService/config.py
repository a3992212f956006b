from dotenv import load_dotenv
from os import environ

load_dotenv()

ENV = environ.get("ENV", "production")
LOG_DIR = environ.get("LOG_DIR", "logs")
MAX_DIM = int(environ.get("MAX_DIM", "200000"))
WORKERS = int(environ.get("WORKERS", "1"))
REGISTRY_URL = environ.get("REGISTRY_URL")  # None -> sqlite file inside the output directory
QUAD_EPSREL = float(environ.get("QUAD_EPSREL", "1e-11"))
QUAD_LIMIT = int(environ.get("QUAD_LIMIT", "200"))
