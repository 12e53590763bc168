import math


def hypotenuse(a, b):
    return math.sqrt(a * a + b * b)


def bucket(value, width):
    return math.floor(value / width) * width
