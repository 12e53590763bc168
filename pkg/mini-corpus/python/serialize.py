import json
import pickle


def to_wire(record):
    return json.dumps(record, sort_keys=True)


def from_wire(blob):
    return json.loads(blob)


def snapshot(obj, path):
    with open(path, "wb") as fh:
        pickle.dump(obj, fh)
