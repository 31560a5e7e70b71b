# Nombre de archivo: __init__.py
# Ubicación de archivo: modules/__init__.py
# Descripción: Inicializa el paquete de módulos de barrido del paisaje y simulación de GD

