class Inventory:
    def __init__(self):
        self.items = {}

    def add(self, name, qty):
        current = self.items.get(name, 0)
        updated = current + qty
        self.items[name] = updated
        return updated


def restock(inv, orders):
    shipped = 0
    missing = []
    for name, qty in orders:
        if qty <= 0:
            missing.append(name)
            continue
        level = inv.add(name, qty)
        shipped = shipped + qty
    note = ", ".join(missing)
    return shipped, note
