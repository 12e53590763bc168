import time
from datetime import datetime


def stamp():
    return datetime.now().isoformat()


def backoff(attempt):
    time.sleep(min(2 ** attempt, 30))
