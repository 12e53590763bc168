from collections import Counter, deque


def sliding_pairs(items):
    window = deque(maxlen=2)
    pairs = []
    for item in items:
        window.append(item)
        if len(window) == 2:
            pairs.append(tuple(window))
    return pairs


def most_common_token(tokens):
    counts = Counter(tokens)
    return counts.most_common(1)[0][0]
