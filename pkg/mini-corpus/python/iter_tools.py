import itertools


def first_n(iterable, n):
    return list(itertools.islice(iterable, n))


def flatten(groups):
    return list(itertools.chain.from_iterable(groups))
