from commands import check, graph, reconstruct, solve, tsa

COMMANDS = (solve, check, reconstruct, graph, tsa)
