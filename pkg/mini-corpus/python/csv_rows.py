import csv


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        return [row for row in reader]


def write_rows(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerows(rows)
