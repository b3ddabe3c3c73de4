"""Bergman fans of matroids with Chow degrees, CSM weights and Cremona maps."""
