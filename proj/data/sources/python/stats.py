def summarize(values):
    total = 0
    count = 0
    smallest = None
    for v in values:
        total = total + v
        count += 1
        if smallest is None or v < smallest:
            smallest = v
    mean = total / count if count else 0.0
    spread = 0.0
    for v in values:
        spread += (v - mean) ** 2
    label = "n=%d" % count
    print(label)
    return mean, spread, smallest
