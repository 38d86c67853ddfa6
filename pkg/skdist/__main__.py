from skdist.cli import main

raise SystemExit(main())
