import random


def sample_names(names, k, seed):
    rng = random.Random(seed)
    return rng.sample(sorted(names), k)


def coin():
    return random.choice(["heads", "tails"])
