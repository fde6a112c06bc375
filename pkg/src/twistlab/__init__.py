"""Free group automorphisms, relative train tracks and Dehn twist normal forms."""
