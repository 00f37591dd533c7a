"""Second-order KKT analysis for C^{1,1} vector optimization problems."""
