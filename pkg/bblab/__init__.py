# bblab package – exact lattice arithmetic and Hilbert-square cohomology checks
