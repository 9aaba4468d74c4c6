package app;

public class UserService {
    private final Repository repo;

    public UserService(Repository repo) {
        this.repo = repo;
    }

    public void register(String name, String email) {
        if (name == null || name.isEmpty()) {
            throw new IllegalArgumentException("name required");
        }
        if (email == null || !email.contains("@")) {
            throw new IllegalArgumentException("bad email");
        }
        repo.save(name, email);
    }

    public void update(String name, String email) {
        if (name == null || name.isEmpty()) {
            throw new IllegalArgumentException("name required");
        }
        if (email == null || !email.contains("@")) {
            throw new IllegalArgumentException("bad email");
        }
        repo.update(name, email);
    }

    public int count() {
        return repo.size();
    }
}
