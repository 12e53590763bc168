import matplotlib.pyplot as plt


def save_line(xs, ys, out):
    plt.figure(figsize=(4, 3))
    plt.plot(xs, ys, marker="o")
    plt.savefig(out)
    plt.close()
