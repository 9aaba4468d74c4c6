package mail;

public interface Transport {
    void send(Message m);
}
