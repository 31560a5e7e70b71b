# Nombre de archivo: __main__.py
# Ubicación de archivo: cli/__main__.py
# Descripción: Permite ejecutar la CLI con ``python -m cli``

import sys

from .main import main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
