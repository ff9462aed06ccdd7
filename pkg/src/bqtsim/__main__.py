from bqtsim.cli import main

main()
