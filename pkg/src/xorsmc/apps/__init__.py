"""Application encodings: shelter placement and supply-chain design."""
