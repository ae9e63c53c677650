from statenet.main import main

main()
