"""Parsing generated model answers back into IOB2 tags with greedy
span matching; anything malformed degrades to an all-O prediction."""

from seqlabkit import map_to_tags, parse_and_map, parse_response

options = ["person", "location", "organization", "miscellaneous"]
tokens = ["LOS", "ANGELES", "AT", "MONTREAL"]

parsed = parse_response("LOS ANGELES:organization;MONTREAL:location", options)
print("extractions:", parsed.extractions)
print("tags       :", [t.to_string() for t in map_to_tags(parsed, tokens)])

# Only the first line counts; later lines are model overgeneration.
rambling = "MONTREAL:location\nAlso, here are 14 more thoughts about hockey..."
print("first line :", [t.to_string() for t in parse_and_map(rambling, tokens, options)])

# NA is the explicit no-spans signal.
print("NA         :", [t.to_string() for t in parse_and_map("NA", tokens, options)])

# Unknown classes, broken grammar, unmatched spans: all-O, never an exception.
for raw in ["LOS ANGELES:city", "what?", "Paris:location"]:
    print(f"{raw!r:25s} ->", [t.to_string() for t in parse_and_map(raw, tokens, options)])

# Repeated span text: the earliest unclaimed occurrence wins.
twice = ["Paris", "loves", "Paris"]
print("claims     :", [t.to_string() for t in parse_and_map("Paris:location;Paris:person", twice, options)])
