"""Shared 20-text fixture for contract tests."""

# Twenty texts covering short/long, unicode, punctuation, and emptiness.
FIXTURE_TEXTS = [
    "graphene conducts heat",
    "Neutron star mergers emit gravitational waves.",
    "The membrane rejects salt ions while water passes.",
    "deep neural network models",
    "A",
    "",
    "   ",
    "quantum lattice vibrations melt the crystal",
    "Protein folding follows the genome blueprint.",
    "water water water water water",
    "café résumé naïveté",  # multi-byte offsets
    "punctuation, everywhere; truly: yes (indeed)!",
    "mixed CASE Words Here",
    "a b c d e f g h i j",
    "the of and in on for with",
    "graphene graphene graphene network network",
    "Salt filters improve with graphene membranes. " * 3,
    "one-token",
    "hyphen-joined word-pairs everywhere",
    "word " * 700,  # forces windowed extraction
]
