import os


def list_configs(root):
    found = []
    for name in os.listdir(root):
        full = os.path.join(root, name)
        if name.endswith(".cfg") and os.path.isfile(full):
            found.append(full)
    return sorted(found)
