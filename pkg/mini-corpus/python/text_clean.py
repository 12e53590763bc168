import re

DIGITS = re.compile(r"\d+")


def scrub(text):
    return re.sub(r"\s+", " ", text).strip()


def count_numbers(text):
    return len(DIGITS.findall(text))
