from abel_orbits.cli import main

raise SystemExit(main())
